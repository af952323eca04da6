#ifndef SGF_LEVY_HPP
#define SGF_LEVY_HPP

#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "sgf/path.hpp"
#include "sgf/rng.hpp"

namespace sgf {

// Convention for the compensator h(y) inside
//   psi(q) = drift q + \int (e^{qy} - 1 - q h(y)) density(y) dy - killing.
enum class Compensator {
  none,        // h = 0 (finite-variation bookkeeping)
  linear_unit, // h = y 1_{|y|<1}
  expm1_full,  // h = e^y - 1
  expm1_unit,  // h = (e^y - 1) 1_{|e^y - 1| < 1}
};

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double x) const { return x > lo && x < hi; }
};

// Description of a one-dimensional Levy process by drift, absolutely
// continuous Levy density on `support`, killing rate and a compensator
// convention.  `strip` is the declared convergence strip of the Laplace
// exponent; q outside it is a domain error.
struct LevySpec {
  double drift = 0.0;
  std::function<double(double)> density;  // nullable: no jumps
  Interval support;
  double small_jump_cutoff = 1e-4;
  double killing_rate = 0.0;
  Compensator comp = Compensator::none;
  Interval strip;
  std::string name = "levy";

  bool has_jumps() const { return static_cast<bool>(density); }
  void validate() const;  // sign, integrability, killing checks
};

// psi(q) under the spec's compensator convention; deterministic given the
// spec and quadrature settings.
double laplace_exponent(const LevySpec& spec, double q);

// \int f(y) density(y) dy over the support, with log-substitution near the
// origin and at infinite ends so |y|^{-1-theta}-type singularities and
// exponential tails are handled at ~1e-10 relative accuracy.
double levy_integral(const LevySpec& spec,
                     const std::function<double(double)>& f);
// Same restricted to one side of the origin (side > 0: y > 0).
double levy_integral_side(const LevySpec& spec, int side,
                          const std::function<double(double)>& f);

// One-time inverse-CDF table for sampling a (not necessarily normalised)
// density on an interval; cells are integrated as local power laws, which
// keeps heavy tails and integrable endpoint singularities accurate.
class TabulatedSampler {
 public:
  TabulatedSampler(std::function<double(double)> density, double lo, double hi,
                   std::size_t n_cells = 4096);
  double total_mass() const { return mass_.back(); }
  double sample(Rng& rng) const;
  // CDF value of the normalised law (for tests)
  double cdf(double x) const;

 private:
  std::vector<double> edges_;
  std::vector<double> dens_;
  std::vector<double> mass_;  // cumulative
  std::vector<double> expo_;  // per-cell power-law exponent
};

struct StableParams {
  double theta = 0.0;  // index in (0,2]
  double c_plus = 0.0;
  double c_minus = 0.0;
  double rho = 0.5;  // P(X_1 < 0)

  // Family normalisation theta(1-rho) = 1/2:
  //   c+ = Gamma(1+theta)/pi, c- = -Gamma(1+theta) cos(pi theta)/pi.
  static StableParams family(double theta);
  // c± from (theta, rho) via the Gamma-sine relations.
  static StableParams from_rho(double theta, double rho);
  // Params with explicit Levy constants; rho recovered from the skewness.
  static StableParams from_constants(double theta, double cp, double cm);

  double beta() const { return (c_plus - c_minus) / (c_plus + c_minus); }
  // scale^theta multiplying the standard CMS variate
  double cms_scale() const;
  void validate() const;
};

// Exact strictly-stable increment (Chambers-Mallows-Stuck).
double stable_increment(const StableParams& p, double dt, Rng& rng);

// Path of the strictly stable process on [0, horizon] with n_steps uniform
// increments.  Increment-level sampler: no jump decomposition is recorded.
PathSample sample_stable(const StableParams& p, double horizon, int n_steps,
                         Rng& rng);

// General LevySpec path: drift + compensation + compound Poisson of jumps
// with |y| > small_jump_cutoff.  Jumps are carried exactly in the jump list.
PathSample sample_levy(const LevySpec& spec, double horizon, int n_steps,
                       Rng& rng);

// Shared jump machinery for LevySpec simulation (rate, compensated drift and
// the jump-size sampler), cached by callers that simulate many paths.
struct LevySimulator {
  explicit LevySimulator(const LevySpec& spec);
  const LevySpec& spec() const { return *spec_; }
  double jump_rate() const { return jump_rate_; }
  double effective_drift() const { return effective_drift_; }
  double sample_jump(Rng& rng) const;
  PathSample run(double horizon, int n_steps, Rng& rng) const;

 private:
  std::shared_ptr<const LevySpec> spec_;
  double jump_rate_ = 0.0;
  double effective_drift_ = 0.0;
  std::shared_ptr<const TabulatedSampler> neg_;
  std::shared_ptr<const TabulatedSampler> pos_;
  double p_neg_ = 0.0;
};

// Scalar Brownian bridge from x0 to x1 over [0, length].
PathSample sample_brownian_bridge(double x0, double x1, double length,
                                  int n_steps, Rng& rng);

// Norm of three independent scalar Brownian bridges 0 -> 0: a BES(3) bridge.
PathSample sample_bessel3_bridge(double length, int n_steps, Rng& rng);

// Stable path conditioned (approximately) to end at `endpoint`: free paths
// are rejected until the terminal value lands in a window of half-width
//   tolerance * max(|endpoint|, length^{1/theta}).
// Throws SamplingError when the estimated acceptance is below `floor`.
PathSample sample_stable_bridge(const StableParams& p, double length,
                                double endpoint, int n_steps, double tolerance,
                                Rng& rng, double floor = 1e-7,
                                long max_tries = 2000000);

}  // namespace sgf

#endif

#ifndef SGF_STABLE_DENSITY_HPP
#define SGF_STABLE_DENSITY_HPP

#include <memory>
#include <vector>

#include "sgf/levy.hpp"
#include "sgf/path.hpp"
#include "sgf/rng.hpp"

namespace sgf {

// Density of X(1) for the strictly stable process described by StableParams.
// Core region: Fourier inversion of the characteristic function tabulated on
// a dense grid (monotone cubic interpolation of log p).  Fat tails: the
// asymptotic power series.  Thin tail of a spectrally one-sided process:
// saddle-point approximation (used only where the density is astronomically
// small, e.g. conditioning weights).
class StableDensity {
 public:
  explicit StableDensity(const StableParams& p);

  double pdf(double x) const;
  double log_pdf(double x) const;
  double mode() const { return mode_; }
  double max_pdf() const { return max_pdf_; }
  const StableParams& params() const { return params_; }

  // density of X(t) at x, by self-similarity
  double pdf_t(double t, double x) const;
  double log_pdf_t(double t, double x) const;

  // direct Fourier integral, no tables (slow; used for tests and splicing)
  double pdf_fourier(double x) const;

 private:
  double series_tail(double x, int side) const;  // side=+1: x>0
  double log_saddle(double x, int side) const;
  bool thin_side(int side) const;

  StableParams params_;
  double alpha_ = 0.0, a_ = 0.0, d_ = 0.0;  // -log phi(u) = a u^a - i d u^a
  double k_ = 0.0, phi_arg_ = 0.0;          // polar form K e^{-i Phi}
  double mode_ = 0.0, max_pdf_ = 0.0;
  double x_lo_ = 0.0, x_hi_ = 0.0;  // table range (series/saddle beyond)
  std::vector<double> grid_, logp_, slope_;
};

// Stable bridge sampled by dyadic midpoint conditioning: exact bridge law on
// the dyadic grid up to density interpolation error.  n_steps must be a power
// of two.  Used where endpoint rejection is impractical (short bridges).
PathSample sample_stable_bridge_dyadic(const StableDensity& d, double length,
                                       double x0, double x1, int n_steps,
                                       Rng& rng);

}  // namespace sgf

#endif

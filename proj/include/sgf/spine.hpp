#ifndef SGF_SPINE_HPP
#define SGF_SPINE_HPP

#include <memory>
#include <vector>

#include "sgf/cellsys.hpp"
#include "sgf/lamperti.hpp"
#include "sgf/spectral.hpp"

namespace sgf {

// Characteristics of the tilted (tagged-cell) evolution: the hat MAP runs the
// omega-tilted flipped Levy dynamics per sign, switches sign at rates
// sigma±(omega) and jumps by the size-biased cross-sign law at switches.
struct SpineSpec {
  CumulantBundle bundle;
  AdmissibleTriplet triplet;
  double alpha = 0.0;
  MapSpec hat_map;

  // max |assembled F-hat entry - cumulant-form entry| over a probe grid
  double probe_grid_residual(const std::vector<double>& qs) const;
};

// Assembles the hat MAP from the cumulant data.  Requires density-form jump
// laws (the analytic layer handles atoms, the simulation layer does not) and
// a triplet whose residuals are within `residual_tol`.
SpineSpec build_spine_spec(const CumulantBundle& bundle,
                           const AdmissibleTriplet& triplet, double alpha,
                           double residual_tol = 1e-6);

// The explicit spine process: Lamperti-Kiu of the hat MAP.
PathSample simulate_Y(const SpineSpec& spec, double z, double horizon,
                      int n_steps, Rng& rng);

struct TaggedTrajectory {
  PathSample values;              // the tagged cell mass over time
  std::vector<double> birth_times;  // b_{L(n)}, ascending, [0] = 0
  std::vector<std::vector<int>> ray;  // labels of the spine nodes
  double weight = 1.0;            // importance weight wrt the tilted law
  double truncated_weight = 0.0;  // omega-mass of jumps below the floor
  bool reached_horizon = false;

  int generation_at(double t) const;
};

// Sequential size-biased simulation of the tagged cell: each generation grows
// one cell under the untilted law, selects the next spine node with
// probability proportional to v |jump|^omega over the realised jump list, and
// accumulates the exact importance weight M_gen / (v |mass|^omega) for the
// missing path tilt.  Estimators under the tilted law weight by `weight`.
TaggedTrajectory simulate_tagged_cell(const SsmpSimulator& sim,
                                      const AdmissibleTriplet& triplet,
                                      const TruncationPolicy& policy,
                                      Rng& rng);

struct SpineIdentityReport {
  double lhs = 0.0;  // v_sgn(z) |z|^omega * E-hat[f(X-hat(t))] (weighted MC)
  double lhs_se = 0.0;
  double rhs = 0.0;  // E[sum v |X_i(t)|^omega f(X_i(t))] over snapshots
  double rhs_se = 0.0;
  double z_score = 0.0;
};

SpineIdentityReport spine_temporal_identity_test(
    const SsmpSimulator& sim, const AdmissibleTriplet& triplet,
    const TruncationPolicy& policy,
    const std::function<double(double)>& weight_fn, double t, int n_samples,
    Rng& rng);

}  // namespace sgf

#endif

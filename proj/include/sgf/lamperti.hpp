#ifndef SGF_LAMPERTI_HPP
#define SGF_LAMPERTI_HPP

#include "sgf/map.hpp"
#include "sgf/path.hpp"
#include "sgf/rng.hpp"

namespace sgf {

// Self-similar Markov process description: MAP characteristics, index and a
// nonzero start value.
struct SsmpSpec {
  MapSpec map;
  double alpha = 0.0;
  double start = 1.0;
  std::string name = "ssmp";

  void validate() const;
};

// X(t) = sign(t) |z| exp(xi(tau(t))) with
//   tau(t) = inf{ s : \int_0^s e^{alpha xi(u)} du > t |z|^{-alpha} }.
// The MAP grid is treated as exact piecewise-linear-between-jumps data, so
// the time change is evaluated in closed form per segment.  Output covers
// [0, min(horizon, T0)]; `alive=false` flags truncation at T0 or killing.
PathSample lamperti_kiu(const MapPath& map_path, double alpha, double z,
                        double horizon, int n_steps);

// Recover (xi, J) from a nonzero X path on its grid; round-trips with
// lamperti_kiu to grid tolerance.
MapPath inverse_time_change(const PathSample& ssmp_path, double alpha,
                            double z);

// Samples the MAP adaptively (horizon doubling) until the additive functional
// covers `horizon` in X-time or the path is absorbed, then applies the
// representation.
// Not thread-safe: the cutoff ladder grows lazily.  Parallel drivers use one
// simulator per worker.
class SsmpSimulator {
 public:
  explicit SsmpSimulator(const SsmpSpec& spec);
  const SsmpSpec& spec() const { return spec_; }
  PathSample run(double horizon, int n_steps, Rng& rng) const;
  // Same dynamics started from a different mass (the MAP machinery is
  // start-independent, only the time change sees z).
  //   jump_cutoff_hint: callers that only consume jumps above some size may
  //     raise the small-jump cutoff; the simulator picks the closest coarser
  //     rung of a quantised ladder (mean compensation keeps paths unbiased).
  //   stop_mass: cut the output at the first time |X| falls to this level;
  //     the path is flagged `truncated`, not dead.
  PathSample run_from(double z, double horizon, int n_steps, Rng& rng,
                      double jump_cutoff_hint = 0.0,
                      double stop_mass = 0.0) const;

 private:
  const MapSimulator& rung_for(double cutoff_hint) const;

  SsmpSpec spec_;
  mutable std::vector<std::pair<double, std::unique_ptr<MapSimulator>>>
      ladder_;  // (cutoff, simulator), geometric rungs built on demand
};

PathSample simulate_ssmp(const SsmpSpec& spec, double horizon, int n_steps,
                         Rng& rng);

}  // namespace sgf

#endif

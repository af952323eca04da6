#ifndef SGF_PATH_HPP
#define SGF_PATH_HPP

#include <algorithm>
#include <cstddef>
#include <vector>

#include "sgf/errors.hpp"

namespace sgf {

struct Jump {
  double time = 0.0;
  double size = 0.0;
  double value_before = 0.0;
  bool sign_flip = false;  // set for modulator-switch jumps in MAP paths
};

// Discretised cadlag path: values on a strictly increasing grid plus the
// exact list of simulated jumps.  Between grid points the continuous part is
// linear; value_at reconstructs the cadlag value exactly for paths built from
// drift + jumps.
struct PathSample {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<Jump> jumps;
  double duration = 0.0;
  bool alive = true;
  // output cut early for bookkeeping reasons (stop level, budget); the
  // process itself is not dead at `duration`
  bool truncated = false;

  std::size_t size() const { return times.size(); }
  double front() const { return values.front(); }
  double back() const { return values.back(); }

  double value_at(double t) const {
    if (times.empty()) throw DomainError("PathSample::value_at: empty path");
    if (t <= times.front()) return values.front();
    if (t >= times.back()) return values.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
    const double t0 = times[i], t1 = times[i + 1];
    double jump_in_cell = 0.0, jump_up_to_t = 0.0;
    for (const Jump& j : jumps) {
      if (j.time > t0 && j.time <= t1) {
        jump_in_cell += j.size;
        if (j.time <= t) jump_up_to_t += j.size;
      }
    }
    const double slope =
        (values[i + 1] - values[i] - jump_in_cell) / (t1 - t0);
    return values[i] + slope * (t - t0) + jump_up_to_t;
  }

  void check_invariants() const {
    if (times.size() != values.size())
      throw ConfigError("PathSample: times/values length mismatch");
    for (std::size_t i = 1; i < times.size(); ++i)
      if (times[i] <= times[i - 1])
        throw ConfigError("PathSample: grid not strictly increasing");
    for (const Jump& j : jumps)
      if (j.time < 0.0 || j.time > duration)
        throw ConfigError("PathSample: jump outside [0, duration]");
  }
};

}  // namespace sgf

#endif

#include "sgf/lamperti.hpp"

#include <algorithm>
#include <cmath>

#include "sgf/errors.hpp"

namespace sgf {

namespace {

// Linear segment of the additive part between consecutive discontinuities.
// `parity` is +1 while the modulator equals its starting state.
struct Seg {
  double u0, u1;
  double xi0, xi1;
  int parity;
  double acc0, acc1;  // additive functional \int e^{alpha xi} at u0/u1
};

double seg_integral(const Seg& s, double alpha, double u) {
  const double du = u - s.u0;
  if (du <= 0.0) return 0.0;
  const double len = s.u1 - s.u0;
  const double slope = len > 0 ? (s.xi1 - s.xi0) / len : 0.0;
  const double w = alpha * slope * du;
  const double base = std::exp(alpha * s.xi0) * du;
  if (std::abs(w) < 1e-12) return base * (1.0 + 0.5 * w);
  return base * std::expm1(w) / w;
}

double seg_invert(const Seg& s, double alpha, double target) {
  const double len = s.u1 - s.u0;
  const double slope = len > 0 ? (s.xi1 - s.xi0) / len : 0.0;
  const double e0 = std::exp(alpha * s.xi0);
  const double am = alpha * slope;
  double u;
  if (std::abs(am * len) < 1e-12) {
    u = s.u0 + target / e0;
  } else {
    const double arg = target * am / e0;
    if (arg <= -1.0) return s.u1;  // target saturates the segment capacity
    u = s.u0 + std::log1p(arg) / am;
  }
  if (!std::isfinite(u)) return s.u1;
  return std::clamp(u, s.u0, s.u1);
}

std::vector<Seg> build_segments(const MapPath& mp, double alpha) {
  const PathSample& p = mp.additive;
  std::vector<Seg> segs;
  segs.reserve(p.times.size() + p.jumps.size());
  std::size_t jk = 0;
  int parity = +1;
  double cur_u = p.times.front();
  double cur_x = p.values.front();
  for (std::size_t i = 0; i + 1 < p.times.size(); ++i) {
    const double u1 = p.times[i + 1];
    while (jk < p.jumps.size() && p.jumps[jk].time <= u1) {
      const Jump& j = p.jumps[jk];
      if (j.time > cur_u)
        segs.push_back(Seg{cur_u, j.time, cur_x, j.value_before, parity, 0, 0});
      cur_u = j.time;
      cur_x = j.value_before + j.size;
      if (j.sign_flip) parity = -parity;
      ++jk;
    }
    if (u1 > cur_u) {
      segs.push_back(Seg{cur_u, u1, cur_x, p.values[i + 1], parity, 0, 0});
      cur_u = u1;
      cur_x = p.values[i + 1];
    }
  }
  double acc = 0.0;
  for (Seg& s : segs) {
    s.acc0 = acc;
    acc += seg_integral(s, alpha, s.u1);
    s.acc1 = acc;
  }
  return segs;
}

}  // namespace

void SsmpSpec::validate() const {
  if (start == 0.0) throw ConfigError(name + ": start mass must be nonzero");
  map.validate();
}

PathSample lamperti_kiu(const MapPath& map_path, double alpha, double z,
                        double horizon, int n_steps) {
  if (z == 0.0) throw DomainError("lamperti_kiu: z must be nonzero");
  if (horizon <= 0.0 || n_steps < 1)
    throw ConfigError("lamperti_kiu: need horizon > 0, n_steps >= 1");
  const double az = std::pow(std::abs(z), -alpha);
  std::vector<Seg> segs = build_segments(map_path, alpha);
  if (segs.empty()) throw ConfigError("lamperti_kiu: empty MAP path");
  const double total = segs.back().acc1;
  const double total_x_time = total / az;
  const double covered = std::min(horizon, total_x_time);
  const double sgn_z = z > 0 ? 1.0 : -1.0;

  PathSample out;
  out.duration = covered;
  out.alive = total_x_time >= horizon * (1.0 - 1e-12);

  const double dt = covered / n_steps;
  std::size_t si = 0;
  for (int k = 0; k <= n_steps; ++k) {
    const double t = std::min(covered, k * dt);
    const double target = t * az;
    while (si + 1 < segs.size() && segs[si].acc1 < target) ++si;
    const Seg& s = segs[si];
    const double u = seg_invert(s, alpha, std::max(0.0, target - s.acc0));
    const double len = s.u1 - s.u0;
    const double slope = len > 0 ? (s.xi1 - s.xi0) / len : 0.0;
    const double xi = s.xi0 + slope * (u - s.u0);
    out.times.push_back(t);
    out.values.push_back(sgn_z * s.parity * std::abs(z) * std::exp(xi));
  }
  for (std::size_t i = 1; i < out.times.size();) {
    if (out.times[i] <= out.times[i - 1]) {
      out.times.erase(out.times.begin() + static_cast<long>(i));
      out.values.erase(out.values.begin() + static_cast<long>(i));
    } else {
      ++i;
    }
  }

  // image of each xi-jump in X-time (jumps sit exactly at segment boundaries)
  std::size_t seg_idx = 0;
  for (const Jump& j : map_path.additive.jumps) {
    while (seg_idx < segs.size() && segs[seg_idx].u1 < j.time) ++seg_idx;
    if (seg_idx >= segs.size()) break;
    const Seg& before = segs[seg_idx];
    const double a_at = (before.u1 <= j.time) ? before.acc1 : before.acc0;
    const double t_img = a_at / az;
    if (t_img > covered * (1.0 + 1e-12)) break;
    const int parity_before = before.parity;
    const double x_before =
        sgn_z * parity_before * std::abs(z) * std::exp(j.value_before);
    const int parity_after = j.sign_flip ? -parity_before : parity_before;
    const double x_after = sgn_z * parity_after * std::abs(z) *
                           std::exp(j.value_before + j.size);
    Jump out_j;
    out_j.time = std::min(t_img, covered);
    out_j.size = x_after - x_before;
    out_j.value_before = x_before;
    out_j.sign_flip = j.sign_flip;
    out.jumps.push_back(out_j);
  }
  return out;
}

MapPath inverse_time_change(const PathSample& ssmp_path, double alpha,
                            double z) {
  MapPath out;
  out.start_state = ssmp_path.values.front() > 0 ? +1 : -1;
  double s_acc = 0.0;
  int prev_sign = out.start_state;
  std::size_t jk = 0;
  const auto& jumps = ssmp_path.jumps;
  for (std::size_t i = 0; i < ssmp_path.times.size(); ++i) {
    const double x = ssmp_path.values[i];
    if (x == 0.0) throw DomainError("inverse_time_change: path touches zero");
    if (i > 0) {
      // trapezoid of |X|^{-alpha} over the cell, split exactly at jumps
      double t0 = ssmp_path.times[i - 1];
      double v0 = std::abs(ssmp_path.values[i - 1]);
      while (jk < jumps.size() && jumps[jk].time <= ssmp_path.times[i]) {
        const Jump& j = jumps[jk];
        if (j.time > t0) {
          const double vb = std::abs(j.value_before);
          s_acc += 0.5 * (j.time - t0) *
                   (std::pow(v0, -alpha) + std::pow(vb, -alpha));
          t0 = j.time;
          v0 = std::abs(j.value_before + j.size);
        } else {
          v0 = std::abs(j.value_before + j.size);
        }
        ++jk;
      }
      const double t1 = ssmp_path.times[i];
      if (t1 > t0)
        s_acc += 0.5 * (t1 - t0) *
                 (std::pow(v0, -alpha) + std::pow(std::abs(x), -alpha));
    }
    double s = s_acc;
    if (!out.additive.times.empty() && s <= out.additive.times.back())
      s = out.additive.times.back() * (1.0 + 1e-15) + 1e-300;
    out.additive.times.push_back(s);
    out.additive.values.push_back(std::log(std::abs(x / z)));
    const int sign = x > 0 ? +1 : -1;
    out.modulator.push_back(sign);
    if (sign != prev_sign) {
      out.switch_times.push_back(s);
      prev_sign = sign;
    }
  }
  out.additive.duration = out.additive.times.back();
  return out;
}

SsmpSimulator::SsmpSimulator(const SsmpSpec& spec) : spec_(spec) {
  spec_.validate();
  ladder_.emplace_back(spec_.map.xi_plus.small_jump_cutoff,
                       std::make_unique<MapSimulator>(spec_.map));
}

const MapSimulator& SsmpSimulator::rung_for(double cutoff_hint) const {
  const double base = ladder_.front().first;
  if (!(cutoff_hint > base)) return *ladder_.front().second;
  // largest rung base*4^k not exceeding the hint, capped at 4^12
  std::size_t want = 0;
  double eps = base;
  while (eps * 4.0 <= cutoff_hint && want < 12) {
    eps *= 4.0;
    ++want;
  }
  while (ladder_.size() <= want) {
    MapSpec coarse = spec_.map;
    const double cut = ladder_.back().first * 4.0;
    coarse.xi_plus.small_jump_cutoff = cut;
    coarse.xi_minus.small_jump_cutoff = cut;
    ladder_.emplace_back(cut, std::make_unique<MapSimulator>(coarse));
  }
  return *ladder_[want].second;
}

namespace {

// cut a path at the first time |X| reaches `stop`, dropping later jumps
void truncate_at_level(PathSample& path, double stop) {
  double t_stop = HUGE_VAL;
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    if (std::abs(path.values[i]) <= stop) {
      t_stop = path.times[i];
      break;
    }
  }
  for (const Jump& j : path.jumps) {
    if (j.time >= t_stop) break;
    if (std::abs(j.value_before + j.size) <= stop) t_stop = j.time;
  }
  if (t_stop == HUGE_VAL || t_stop >= path.duration) return;
  const double x_stop = path.value_at(t_stop);
  std::size_t keep = 0;
  while (keep < path.times.size() && path.times[keep] < t_stop) ++keep;
  path.times.resize(keep);
  path.values.resize(keep);
  path.times.push_back(t_stop);
  path.values.push_back(x_stop);
  std::size_t jk = 0;
  while (jk < path.jumps.size() && path.jumps[jk].time <= t_stop) ++jk;
  path.jumps.resize(jk);
  path.duration = t_stop;
  path.truncated = true;
}

}  // namespace

PathSample SsmpSimulator::run(double horizon, int n_steps, Rng& rng) const {
  return run_from(spec_.start, horizon, n_steps, rng);
}

PathSample SsmpSimulator::run_from(double z, double horizon, int n_steps,
                                   Rng& rng, double jump_cutoff_hint,
                                   double stop_mass) const {
  if (z == 0.0) throw DomainError("ssmp: start mass must be nonzero");
  const MapSimulator& map_sim_ = rung_for(jump_cutoff_hint);
  const double az = std::pow(std::abs(z), -spec_.alpha);
  const double need = horizon * az;
  const double stop_level =
      stop_mass > 0.0 ? std::log(stop_mass / std::abs(z)) : -HUGE_VAL;
  double map_horizon = std::min(std::max(1.0, need), 4.0);
  MapPath mp;
  for (int round = 0; round < 48; ++round) {
    const int steps =
        std::max(64, static_cast<int>(std::min(1e6, map_horizon * 64.0)));
    if (round == 0) {
      mp = map_sim_.run(z > 0 ? +1 : -1, map_horizon, steps, rng);
    } else {
      const int cur = mp.modulator.back();
      MapPath ext = map_sim_.run(cur, map_horizon, steps, rng);
      const double t_off = mp.additive.times.back();
      const double x_off = mp.additive.values.back();
      for (std::size_t i = 1; i < ext.additive.times.size(); ++i) {
        mp.additive.times.push_back(t_off + ext.additive.times[i]);
        mp.additive.values.push_back(x_off + ext.additive.values[i]);
        mp.modulator.push_back(ext.modulator[i]);
      }
      for (const Jump& j : ext.additive.jumps) {
        Jump g = j;
        g.time += t_off;
        g.value_before += x_off;
        mp.additive.jumps.push_back(g);
      }
      for (double st : ext.switch_times) mp.switch_times.push_back(t_off + st);
      mp.additive.duration = mp.additive.times.back();
      mp.additive.alive = ext.additive.alive;
    }
    if (!mp.additive.alive) break;
    std::vector<Seg> segs = build_segments(mp, spec_.alpha);
    if (segs.empty()) throw NumericError("ssmp simulation produced no path", 0);
    const double covered = segs.back().acc1;
    if (covered >= need) break;
    const double tail_level = segs.back().xi1;
    if (tail_level <= stop_level) break;  // |X| has reached the stop level
    if (std::exp(spec_.alpha * tail_level) * map_horizon <
        1e-14 * std::max(covered, 1e-300))
      break;  // additive functional has converged: absorption
    map_horizon *= 2.0;
  }
  PathSample out = lamperti_kiu(mp, spec_.alpha, z, horizon, n_steps);
  if (stop_mass > 0.0) truncate_at_level(out, stop_mass);
  return out;
}

PathSample simulate_ssmp(const SsmpSpec& spec, double horizon, int n_steps,
                         Rng& rng) {
  SsmpSimulator sim(spec);
  return sim.run(horizon, n_steps, rng);
}

}  // namespace sgf

#include "sgf/map.hpp"

#include <algorithm>
#include <cmath>

#include "sgf/errors.hpp"

namespace sgf {

Matrix2 Matrix2::operator*(const Matrix2& o) const {
  Matrix2 r;
  r.m[0] = m[0] * o.m[0] + m[1] * o.m[2];
  r.m[1] = m[0] * o.m[1] + m[1] * o.m[3];
  r.m[2] = m[2] * o.m[0] + m[3] * o.m[2];
  r.m[3] = m[2] * o.m[1] + m[3] * o.m[3];
  return r;
}

Matrix2 Matrix2::operator+(const Matrix2& o) const {
  Matrix2 r;
  for (int i = 0; i < 4; ++i) r.m[i] = m[i] + o.m[i];
  return r;
}

Matrix2 Matrix2::operator*(double s) const {
  Matrix2 r;
  for (int i = 0; i < 4; ++i) r.m[i] = m[i] * s;
  return r;
}

Matrix2 Matrix2::identity() {
  Matrix2 r;
  r.m[0] = r.m[3] = 1.0;
  return r;
}

Matrix2 expm(const Matrix2& a, double t) {
  Matrix2 m = a * t;
  double norm = 0.0;
  for (double v : m.m) norm = std::max(norm, std::abs(v));
  int squarings = 0;
  while (norm > 0.5) {
    norm /= 2.0;
    ++squarings;
  }
  m = m * std::pow(0.5, squarings);
  // Pade(6,6)
  const double c[7] = {1.0, 0.5, 5.0 / 44.0, 1.0 / 66.0, 1.0 / 792.0,
                       1.0 / 15840.0, 1.0 / 665280.0};
  Matrix2 m2 = m * m;
  Matrix2 m4 = m2 * m2;
  Matrix2 u_even = Matrix2::identity() * c[0] + m2 * c[2] + m4 * c[4] +
                   (m4 * m2) * c[6];
  Matrix2 u_odd_half = Matrix2::identity() * c[1] + m2 * c[3] + m4 * c[5];
  Matrix2 u_odd = m * u_odd_half;
  Matrix2 num = u_even + u_odd;
  Matrix2 den = u_even + u_odd * (-1.0);
  // invert den (2x2)
  const double det = den(0, 0) * den(1, 1) - den(0, 1) * den(1, 0);
  Matrix2 inv;
  inv(0, 0) = den(1, 1) / det;
  inv(0, 1) = -den(0, 1) / det;
  inv(1, 0) = -den(1, 0) / det;
  inv(1, 1) = den(0, 0) / det;
  Matrix2 r = inv * num;
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

JumpLaw JumpLaw::point_mass(double u0) {
  JumpLaw law;
  law.name = "point-mass";
  law.sample = [u0](Rng&) { return u0; };
  law.laplace = [u0](double q) { return std::exp(q * u0); };
  law.atoms = {{u0, 1.0}};
  law.strip = Interval{};
  return law;
}

JumpLaw JumpLaw::shifted_exponential(double rate, int sign, double shift) {
  if (rate <= 0.0) throw ConfigError("shifted_exponential: rate must be > 0");
  JumpLaw law;
  law.name = "shifted-exponential";
  const double s = sign >= 0 ? 1.0 : -1.0;
  law.sample = [rate, s, shift](Rng& rng) {
    return shift + s * rng.exponential(rate);
  };
  law.laplace = [rate, s, shift](double q) {
    if (s * q >= rate) throw DomainError("shifted_exponential: q beyond strip");
    return std::exp(q * shift) * rate / (rate - s * q);
  };
  law.density = [rate, s, shift](double u) {
    const double v = s * (u - shift);
    return v >= 0.0 ? rate * std::exp(-rate * v) : 0.0;
  };
  if (s > 0) {
    law.density_support = Interval{shift, HUGE_VAL};
    law.strip = Interval{-HUGE_VAL, rate};
  } else {
    law.density_support = Interval{-HUGE_VAL, shift};
    law.strip = Interval{-rate, HUGE_VAL};
  }
  return law;
}

void MapSpec::validate() const {
  if (q_plus < 0.0 || q_minus < 0.0)
    throw ConfigError(name + ": switch rates must be nonnegative");
  xi_plus.validate();
  xi_minus.validate();
  if (q_plus > 0.0 && !u_plus.valid())
    throw ConfigError(name + ": q+ > 0 requires a U+ law");
  if (q_minus > 0.0 && !u_minus.valid())
    throw ConfigError(name + ": q- > 0 requires a U- law");
  if (q_plus > 0.0 && std::abs(u_plus.laplace(0.0) - 1.0) > 1e-10)
    throw ConfigError(name + ": G+-(0) != 1");
  if (q_minus > 0.0 && std::abs(u_minus.laplace(0.0) - 1.0) > 1e-10)
    throw ConfigError(name + ": G-+(0) != 1");
}

Matrix2 matrix_exponent(const MapSpec& spec, double q) {
  Matrix2 f;
  f(0, 0) = laplace_exponent(spec.xi_plus, q) - spec.q_plus;
  f(1, 1) = laplace_exponent(spec.xi_minus, q) - spec.q_minus;
  f(0, 1) = spec.q_plus > 0.0 ? spec.q_plus * spec.u_plus.laplace(q) : 0.0;
  f(1, 0) = spec.q_minus > 0.0 ? spec.q_minus * spec.u_minus.laplace(q) : 0.0;
  return f;
}

int MapPath::state_at(double t) const {
  int s = start_state;
  for (double st : switch_times) {
    if (st <= t)
      s = -s;
    else
      break;
  }
  return s;
}

MapSimulator::MapSimulator(const MapSpec& spec)
    : spec_(std::make_shared<MapSpec>(spec)) {
  spec_->validate();
  plus_ = std::make_shared<LevySimulator>(spec_->xi_plus);
  minus_ = std::make_shared<LevySimulator>(spec_->xi_minus);
}

MapPath MapSimulator::run(int start_state, double horizon, int n_steps,
                          Rng& rng) const {
  if (start_state != 1 && start_state != -1)
    throw ConfigError("sample_map: start_state must be +1 or -1");
  MapPath out;
  out.start_state = start_state;
  PathSample& path = out.additive;
  path.duration = horizon;
  path.times.push_back(0.0);
  path.values.push_back(0.0);
  out.modulator.push_back(start_state);

  int state = start_state;
  double t0 = 0.0;
  double level = 0.0;
  const double dt_target = horizon / std::max(1, n_steps);
  bool killed = false;
  while (t0 < horizon && !killed) {
    const double rate = state > 0 ? spec_->q_plus : spec_->q_minus;
    const LevySimulator& sim = state > 0 ? *plus_ : *minus_;
    const JumpLaw& law = state > 0 ? spec_->u_plus : spec_->u_minus;
    const double t_switch =
        rate > 0.0 ? rng.exponential(rate) : HUGE_VAL;
    const double seg_len = std::min(t_switch, horizon - t0);
    const int seg_steps =
        std::max(1, static_cast<int>(std::ceil(seg_len / dt_target)));
    PathSample seg = sim.run(seg_len, seg_steps, rng);
    // splice segment into the global path
    for (std::size_t i = 1; i < seg.times.size(); ++i) {
      path.times.push_back(t0 + seg.times[i]);
      path.values.push_back(level + seg.values[i]);
      out.modulator.push_back(state);
    }
    for (const Jump& j : seg.jumps) {
      Jump g = j;
      g.time = t0 + j.time;
      g.value_before = level + j.value_before;
      path.jumps.push_back(g);
    }
    if (!seg.alive) {  // killed inside the segment
      path.duration = t0 + seg.duration;
      path.alive = false;
      killed = true;
      break;
    }
    level += seg.values.back();
    t0 += seg_len;
    if (t_switch < horizon - (t0 - seg_len) && t0 < horizon) {
      // modulator switch with its U jump; the jump is stamped at the nudged
      // grid instant so grid values at or after it include the jump
      const double u = law.sample(rng);
      const double t_jump = t0 * (1.0 + 1e-15) + 1e-300;
      Jump g;
      g.time = t_jump;
      g.size = u;
      g.value_before = level;
      g.sign_flip = true;
      path.jumps.push_back(g);
      level += u;
      state = -state;
      out.switch_times.push_back(t_jump);
      path.times.push_back(t_jump);
      path.values.push_back(level);
      out.modulator.push_back(state);
    }
  }
  if (path.times.back() < path.duration && path.alive) {
    path.times.push_back(path.duration);
    path.values.push_back(level);
    out.modulator.push_back(state);
  }
  return out;
}

MapPath sample_map(const MapSpec& spec, int start_state, double horizon,
                   int n_steps, Rng& rng) {
  MapSimulator sim(spec);
  return sim.run(start_state, horizon, n_steps, rng);
}

}  // namespace sgf

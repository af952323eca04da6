#include "sgf/levy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sgf/errors.hpp"
#include "sgf/quadrature.hpp"
#include "sgf/special.hpp"

namespace sgf {

namespace {

constexpr double kPi = 3.14159265358979323846;

double compensator_value(Compensator c, double y) {
  switch (c) {
    case Compensator::none:
      return 0.0;
    case Compensator::linear_unit:
      return std::abs(y) < 1.0 ? y : 0.0;
    case Compensator::expm1_full:
      return std::expm1(y);
    case Compensator::expm1_unit: {
      const double e = std::expm1(y);
      return std::abs(e) < 1.0 ? e : 0.0;
    }
  }
  return 0.0;
}

// Kink locations of the compensator, needed to keep quadrature panels smooth.
std::vector<double> compensator_kinks(Compensator c) {
  switch (c) {
    case Compensator::linear_unit:
      return {-1.0, 1.0};
    case Compensator::expm1_unit:
      return {std::log(2.0)};  // e^y - 1 = 1; the -1 side is never reached
    default:
      return {};
  }
}

}  // namespace

void LevySpec::validate() const {
  if (killing_rate < 0.0) throw ConfigError(name + ": killing_rate < 0");
  if (small_jump_cutoff <= 0.0)
    throw ConfigError(name + ": small_jump_cutoff must be positive");
  if (!has_jumps()) return;
  if (support.lo >= support.hi)
    throw ConfigError(name + ": empty jump support");
  // spot-check nonnegativity on a crude grid
  for (int i = 1; i < 64; ++i) {
    const double lo = std::max(support.lo, -50.0);
    const double hi = std::min(support.hi, 50.0);
    const double y = lo + (hi - lo) * i / 64.0;
    if (y == 0.0 || !support.contains(y)) continue;
    if (density(y) < 0.0)
      throw ConfigError(name + ": negative Levy density at y = " +
                        std::to_string(y));
  }
  QuadOptions opt;
  opt.rel_tol = 1e-8;
  opt.throw_on_failure = false;
  const double m2 = levy_integral(
      *this, [](double y) { return std::min(1.0, y * y); });
  if (!std::isfinite(m2) || m2 > 1e14)
    throw ConfigError(name + ": \\int min(1, y^2) density dy diverges");
}

double levy_integral_side(const LevySpec& spec, int side,
                          const std::function<double(double)>& f) {
  if (!spec.has_jumps()) return 0.0;
  // Reduce to an integral over (a, b) with 0 <= a < b <= inf of g.
  double a, b;
  std::function<double(double)> g;
  if (side > 0) {
    a = std::max(0.0, spec.support.lo);
    b = spec.support.hi;
    g = [&spec, &f](double y) { return f(y) * spec.density(y); };
  } else {
    a = std::max(0.0, -spec.support.hi);
    b = -spec.support.lo;
    g = [&spec, &f](double y) { return f(-y) * spec.density(-y); };
  }
  if (a >= b) return 0.0;

  QuadOptions opt;
  opt.rel_tol = 1e-11;
  auto guarded = [&g](double y) {
    const double v = g(y);
    return std::isfinite(v) ? v : 0.0;
  };
  double total = 0.0;
  double lo_reg = a;
  if (a == 0.0) {
    // y = e^{-s} tames |y|^{-1-theta}-type origin singularities; the cap at
    // s = 350 keeps |y|^{-2} representable, the remainder mass is negligible
    // for any integrand with a positive local exponent
    const double delta = std::isfinite(b) ? std::min(0.25, 0.5 * b) : 0.25;
    auto h = [&guarded](double s) {
      const double y = std::exp(-s);
      return guarded(y) * y;
    };
    total += integrate(h, std::log(1.0 / delta), 350.0, opt).value;
    lo_reg = delta;
  }
  if (std::isfinite(b)) {
    total += integrate(guarded, lo_reg, b, opt).value;
  } else {
    // doubling segments avoid probing y where exp factors overflow before
    // in-strip integrands have decayed; unbounded growth is flagged
    double seg_lo = lo_reg;
    double seg_hi = std::max(2.0 * lo_reg, 1.0);
    for (int k = 0; k < 60; ++k) {
      const double c = integrate(guarded, seg_lo, seg_hi, opt).value;
      total += c;
      if (!std::isfinite(total) || std::abs(total) > 1e120)
        throw NumericError("levy_integral: tail integral diverges",
                           std::abs(c));
      if (k > 2 &&
          std::abs(c) < opt.rel_tol * std::abs(total) + opt.abs_tol)
        break;
      if (k == 59)
        throw NumericError("levy_integral: tail integral did not converge",
                           std::abs(c));
      seg_lo = seg_hi;
      seg_hi *= 2.0;
    }
  }
  return total;
}

double levy_integral(const LevySpec& spec,
                     const std::function<double(double)>& f) {
  return levy_integral_side(spec, -1, f) + levy_integral_side(spec, +1, f);
}

double laplace_exponent(const LevySpec& spec, double q) {
  if (!(q > spec.strip.lo && q < spec.strip.hi) && q != 0.0)
    throw DomainError(spec.name + ": q = " + std::to_string(q) +
                      " outside the convergence strip (" +
                      std::to_string(spec.strip.lo) + ", " +
                      std::to_string(spec.strip.hi) + ")");
  double value = spec.drift * q - spec.killing_rate;
  if (spec.has_jumps() && q != 0.0) {
    const Compensator comp = spec.comp;
    value += levy_integral(spec, [comp, q](double y) {
      return std::expm1(q * y) - q * compensator_value(comp, y);
    });
  }
  return value;
}

// ---------------------------------------------------------------------------
// TabulatedSampler

TabulatedSampler::TabulatedSampler(std::function<double(double)> density,
                                   double lo, double hi, std::size_t n_cells) {
  if (!(lo >= 0.0) || !(hi > lo))
    throw ConfigError("TabulatedSampler: need 0 <= lo < hi");
  double hi_eff = hi;
  if (!std::isfinite(hi)) {
    // extend until the local power-law tail estimate is negligible
    hi_eff = std::max(1.0, 4.0 * lo);
    double probe = density(hi_eff);
    double span_mass = probe * hi_eff;
    for (int k = 0; k < 300; ++k) {
      const double nxt = hi_eff * 1.5;
      const double d1 = density(nxt);
      if (d1 <= 0.0 && probe <= 0.0) break;
      const double p = (d1 > 0 && probe > 0)
                           ? std::log(d1 / probe) / std::log(nxt / hi_eff)
                           : -50.0;
      hi_eff = nxt;
      probe = d1;
      const double tail = (p < -1.01) ? d1 * nxt / (-p - 1.0) : HUGE_VAL;
      span_mass = std::max(span_mass, d1 * nxt);
      if (tail < 1e-13 * std::max(span_mass, 1e-300) && k > 4) break;
      if (hi_eff > 1e18)
        throw ConfigError("TabulatedSampler: density tail does not decay");
    }
  }
  const double lo_eff = lo;
  edges_.reserve(n_cells + 1);
  if (lo_eff > 0.0) {
    const double r = std::pow(hi_eff / lo_eff, 1.0 / double(n_cells));
    double x = lo_eff;
    for (std::size_t i = 0; i <= n_cells; ++i) {
      edges_.push_back(x);
      x *= r;
    }
    edges_.back() = hi_eff;
  } else {
    // quadratic clustering near 0, geometric beyond 1
    const std::size_t n_low = n_cells / 4;
    const double knee = std::min(1.0, hi_eff);
    for (std::size_t i = 0; i <= n_low; ++i) {
      const double t = double(i) / double(n_low);
      edges_.push_back(knee * t * t);
    }
    if (hi_eff > knee) {
      const std::size_t n_hi = n_cells - n_low;
      const double r = std::pow(hi_eff / knee, 1.0 / double(n_hi));
      double x = knee;
      for (std::size_t i = 1; i <= n_hi; ++i) {
        x *= r;
        edges_.push_back(std::min(x, hi_eff));
      }
    }
  }
  dens_.resize(edges_.size());
  for (std::size_t i = 0; i < edges_.size(); ++i)
    dens_[i] = std::max(0.0, density(std::max(edges_[i], 1e-300)));
  mass_.assign(edges_.size(), 0.0);
  expo_.assign(edges_.size() - 1, 0.0);
  for (std::size_t i = 0; i + 1 < edges_.size(); ++i) {
    const double x0 = edges_[i], x1 = edges_[i + 1];
    const double f0 = dens_[i], f1 = dens_[i + 1];
    double m;
    if (x0 > 0.0 && f0 > 0.0 && f1 > 0.0) {
      const double p = std::log(f1 / f0) / std::log(x1 / x0);
      expo_[i] = p;
      if (std::abs(p + 1.0) > 1e-9)
        m = f0 * x0 * (std::pow(x1 / x0, p + 1.0) - 1.0) / (p + 1.0);
      else
        m = f0 * x0 * std::log(x1 / x0);
    } else {
      expo_[i] = 0.0;
      m = 0.5 * (f0 + f1) * (x1 - x0);
    }
    mass_[i + 1] = mass_[i] + m;
  }
  if (!(mass_.back() > 0.0))
    throw ConfigError("TabulatedSampler: zero total mass");
}

double TabulatedSampler::sample(Rng& rng) const {
  const double target = rng.u01() * mass_.back();
  const auto it = std::upper_bound(mass_.begin(), mass_.end(), target);
  std::size_t i = std::min<std::size_t>(
      static_cast<std::size_t>(it - mass_.begin()), mass_.size() - 1);
  if (i == 0) i = 1;
  --i;  // cell index
  const double x0 = edges_[i], x1 = edges_[i + 1];
  const double f0 = dens_[i];
  const double want = target - mass_[i];
  const double cell = mass_[i + 1] - mass_[i];
  if (cell <= 0.0) return x0;
  if (x0 > 0.0 && f0 > 0.0 && dens_[i + 1] > 0.0) {
    const double p = expo_[i];
    if (std::abs(p + 1.0) > 1e-9) {
      const double u = want * (p + 1.0) / (f0 * x0) + 1.0;
      return x0 * std::pow(u, 1.0 / (p + 1.0));
    }
    return x0 * std::exp(want / (f0 * x0));
  }
  return x0 + (x1 - x0) * (want / cell);  // trapezoid cells: linear inversion
}

double TabulatedSampler::cdf(double x) const {
  if (x <= edges_.front()) return 0.0;
  if (x >= edges_.back()) return 1.0;
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - edges_.begin()) - 1;
  const double x0 = edges_[i];
  const double f0 = dens_[i];
  double part;
  if (x0 > 0.0 && f0 > 0.0 && dens_[i + 1] > 0.0) {
    const double p = expo_[i];
    if (std::abs(p + 1.0) > 1e-9)
      part = f0 * x0 * (std::pow(x / x0, p + 1.0) - 1.0) / (p + 1.0);
    else
      part = f0 * x0 * std::log(x / x0);
  } else {
    const double frac = (x - x0) / (edges_[i + 1] - x0);
    part = (mass_[i + 1] - mass_[i]) * frac;
  }
  return (mass_[i] + part) / mass_.back();
}

// ---------------------------------------------------------------------------
// Stable increments

StableParams StableParams::family(double theta) {
  StableParams p;
  p.theta = theta;
  p.c_plus = gamma_fn(1.0 + theta) / kPi;
  p.c_minus = -gamma_fn(1.0 + theta) * std::cos(kPi * theta) / kPi;
  p.rho = 1.0 - 0.5 / theta;
  p.validate();
  return p;
}

StableParams StableParams::from_rho(double theta, double rho) {
  StableParams p;
  p.theta = theta;
  p.rho = rho;
  p.c_minus = gamma_fn(1.0 + theta) * std::sin(kPi * theta * rho) / kPi;
  p.c_plus = gamma_fn(1.0 + theta) * std::sin(kPi * theta * (1.0 - rho)) / kPi;
  p.validate();
  return p;
}

StableParams StableParams::from_constants(double theta, double cp, double cm) {
  StableParams p;
  p.theta = theta;
  p.c_plus = cp;
  p.c_minus = cm;
  if (theta < 2.0) {
    // invert the Gamma-sine relations through the skewness formula
    const double t = std::tan(kPi * theta / 2.0);
    p.rho = 0.5 - std::atan(p.beta() * t) / (kPi * theta);
  } else {
    p.rho = 0.5;
  }
  return p;
}

void StableParams::validate() const {
  if (!(theta > 0.0 && theta <= 2.0))
    throw DomainError("StableParams: index must lie in (0, 2]");
  if (theta == 1.0)
    throw DomainError("StableParams: index 1 is not supported");
  if (c_plus < 0.0 || c_minus < 0.0 || c_plus + c_minus <= 0.0)
    throw ConfigError("StableParams: need c+ >= 0, c- >= 0, c+ + c- > 0");
  if (theta < 2.0) {
    const double g = gamma_fn(1.0 + theta) / kPi;
    const double cm = g * std::sin(kPi * theta * rho);
    const double cp = g * std::sin(kPi * theta * (1.0 - rho));
    if (std::abs(cm - c_minus) > 1e-12 * std::max(1.0, std::abs(c_minus)) ||
        std::abs(cp - c_plus) > 1e-12 * std::max(1.0, std::abs(c_plus)))
      throw ConfigError(
          "StableParams: (c+, c-) inconsistent with (theta, rho)");
  }
}

double StableParams::cms_scale() const {
  if (theta == 2.0) return 1.0;
  // -Gamma(-theta) (c+ + c-) cos(pi theta / 2) > 0 for theta in (0,2)\{1}
  const double a =
      -gamma_fn(-theta) * (c_plus + c_minus) * std::cos(kPi * theta / 2.0);
  return a;
}

double stable_increment(const StableParams& p, double dt, Rng& rng) {
  const double alpha = p.theta;
  const double scale = std::pow(p.cms_scale() * dt, 1.0 / alpha);
  if (alpha == 2.0) {
    return scale * std::sqrt(2.0) * rng.normal();
  }
  const double beta = p.beta();
  const double t = std::tan(kPi * alpha / 2.0);
  const double zeta = beta * t;
  const double b = std::atan(zeta) / alpha;
  const double s0 = std::pow(1.0 + zeta * zeta, 0.5 / alpha);
  const double v = kPi * (rng.u01() - 0.5);
  const double w = rng.exponential(1.0);
  const double x = s0 * std::sin(alpha * (v + b)) /
                   std::pow(std::cos(v), 1.0 / alpha) *
                   std::pow(std::cos(v - alpha * (v + b)) / w,
                            (1.0 - alpha) / alpha);
  return scale * x;
}

PathSample sample_stable(const StableParams& p, double horizon, int n_steps,
                         Rng& rng) {
  if (horizon <= 0.0) throw ConfigError("sample_stable: horizon must be > 0");
  if (n_steps < 1) throw ConfigError("sample_stable: n_steps must be >= 1");
  const double dt = horizon / n_steps;
  PathSample out;
  out.times.reserve(n_steps + 1);
  out.values.reserve(n_steps + 1);
  out.times.push_back(0.0);
  out.values.push_back(0.0);
  double x = 0.0;
  for (int i = 1; i <= n_steps; ++i) {
    x += stable_increment(p, dt, rng);
    out.times.push_back(i * dt);
    out.values.push_back(x);
  }
  out.duration = horizon;
  return out;
}

// ---------------------------------------------------------------------------
// General LevySpec simulation

namespace {

// Compensation of the simulated jumps plus the analytic mean of the removed
// small jumps:
//   b_eff = drift - \int_{|y|>eps} h density + \int_{|y|<=eps} (y - h) density.
double compensated_drift(const LevySpec& spec) {
  if (!spec.has_jumps()) return spec.drift;
  const double eps = spec.small_jump_cutoff;
  const Compensator comp = spec.comp;
  auto h = [comp](double y) { return compensator_value(comp, y); };

  auto restricted = [&](double lo, double hi) {
    LevySpec r = spec;
    r.support.lo = std::max(spec.support.lo, lo);
    r.support.hi = std::min(spec.support.hi, hi);
    return r;
  };
  double out = spec.drift;
  // inner mean correction on (-eps, eps) \cap support
  {
    const LevySpec inner = restricted(-eps, eps);
    if (inner.support.lo < inner.support.hi)
      out += levy_integral(inner, [&](double y) { return y - h(y); });
  }
  if (comp != Compensator::none) {
    // outer compensator on |y| > eps, split at the compensator kinks so each
    // panel sees a smooth integrand
    std::vector<double> pts = compensator_kinks(comp);
    pts.push_back(-eps);
    pts.push_back(eps);
    std::sort(pts.begin(), pts.end());
    const LevySpec neg = restricted(-HUGE_VAL, -eps);
    const LevySpec pos = restricted(eps, HUGE_VAL);
    auto kinked = [&](const LevySpec& part, int side) {
      if (part.support.lo >= part.support.hi) return;
      double prev = part.support.lo;
      for (double c : pts) {
        if (c > prev && c < part.support.hi) {
          out -= levy_integral_side(restricted(prev, c), side, h);
          prev = c;
        }
      }
      LevySpec last = part;
      last.support.lo = prev;
      out -= levy_integral_side(last, side, h);
    };
    kinked(neg, -1);
    kinked(pos, +1);
  }
  return out;
}

}  // namespace

LevySimulator::LevySimulator(const LevySpec& spec)
    : spec_(std::make_shared<LevySpec>(spec)) {
  spec_->validate();
  effective_drift_ = compensated_drift(*spec_);
  const double eps = spec_->small_jump_cutoff;
  double mass_neg = 0.0, mass_pos = 0.0;
  if (spec_->has_jumps()) {
    const auto& sp = *spec_;
    if (sp.support.lo < -eps) {
      auto d = [spec = spec_](double y) { return spec->density(-y); };
      neg_ = std::make_shared<TabulatedSampler>(
          d, eps, std::isfinite(sp.support.lo) ? -sp.support.lo : HUGE_VAL);
      mass_neg = neg_->total_mass();
    }
    if (sp.support.hi > eps) {
      auto d = [spec = spec_](double y) { return spec->density(y); };
      pos_ = std::make_shared<TabulatedSampler>(
          d, eps, std::isfinite(sp.support.hi) ? sp.support.hi : HUGE_VAL);
      mass_pos = pos_->total_mass();
    }
  }
  jump_rate_ = mass_neg + mass_pos;
  if (!std::isfinite(jump_rate_))
    throw ConfigError(spec_->name +
                      ": jump rate above the cutoff is infinite; raise "
                      "small_jump_cutoff");
  p_neg_ = jump_rate_ > 0.0 ? mass_neg / jump_rate_ : 0.0;
}

double LevySimulator::sample_jump(Rng& rng) const {
  if (jump_rate_ <= 0.0)
    throw SamplingError(spec_->name + ": no jumps to sample");
  if (rng.u01() < p_neg_) return -neg_->sample(rng);
  return pos_->sample(rng);
}

PathSample LevySimulator::run(double horizon, int n_steps, Rng& rng) const {
  if (horizon <= 0.0) throw ConfigError("sample_levy: horizon must be > 0");
  if (n_steps < 1) throw ConfigError("sample_levy: n_steps must be >= 1");
  PathSample out;
  double duration = horizon;
  out.alive = true;
  if (spec_->killing_rate > 0.0) {
    const double kill_at = rng.exponential(spec_->killing_rate);
    if (kill_at < horizon) {
      duration = kill_at;
      out.alive = false;
    }
  }
  // jump arrivals
  if (jump_rate_ > 0.0) {
    double t = rng.exponential(jump_rate_);
    while (t <= duration) {
      Jump j;
      j.time = t;
      j.size = sample_jump(rng);
      out.jumps.push_back(j);
      t += rng.exponential(jump_rate_);
    }
  }
  const double dt = duration / n_steps;
  out.times.reserve(n_steps + 1);
  out.values.reserve(n_steps + 1);
  double acc = 0.0;
  std::size_t jk = 0;
  for (int i = 0; i <= n_steps; ++i) {
    const double t = i * dt;
    while (jk < out.jumps.size() && out.jumps[jk].time <= t) {
      out.jumps[jk].value_before = effective_drift_ * out.jumps[jk].time + acc;
      acc += out.jumps[jk].size;
      ++jk;
    }
    out.times.push_back(t);
    out.values.push_back(effective_drift_ * t + acc);
  }
  while (jk < out.jumps.size()) {  // jumps between last grid point and duration
    out.jumps[jk].value_before = effective_drift_ * out.jumps[jk].time + acc;
    acc += out.jumps[jk].size;
    ++jk;
  }
  out.duration = duration;
  return out;
}

PathSample sample_levy(const LevySpec& spec, double horizon, int n_steps,
                       Rng& rng) {
  LevySimulator sim(spec);
  return sim.run(horizon, n_steps, rng);
}

// ---------------------------------------------------------------------------
// Bridges

PathSample sample_brownian_bridge(double x0, double x1, double length,
                                  int n_steps, Rng& rng) {
  if (length <= 0.0) throw ConfigError("bridge length must be > 0");
  if (n_steps < 1) throw ConfigError("bridge n_steps must be >= 1");
  PathSample out;
  out.duration = length;
  out.times.reserve(n_steps + 1);
  out.values.reserve(n_steps + 1);
  const double dt = length / n_steps;
  double x = x0;
  out.times.push_back(0.0);
  out.values.push_back(x0);
  for (int i = 1; i < n_steps; ++i) {
    const double remain = length - (i - 1) * dt;
    const double mean = x + (x1 - x) * dt / remain;
    const double var = dt * (remain - dt) / remain;
    x = mean + std::sqrt(std::max(0.0, var)) * rng.normal();
    out.times.push_back(i * dt);
    out.values.push_back(x);
  }
  out.times.push_back(length);
  out.values.push_back(x1);
  return out;
}

PathSample sample_bessel3_bridge(double length, int n_steps, Rng& rng) {
  PathSample a = sample_brownian_bridge(0.0, 0.0, length, n_steps, rng);
  PathSample b = sample_brownian_bridge(0.0, 0.0, length, n_steps, rng);
  PathSample c = sample_brownian_bridge(0.0, 0.0, length, n_steps, rng);
  PathSample out;
  out.duration = length;
  out.times = a.times;
  out.values.resize(a.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i)
    out.values[i] = std::sqrt(a.values[i] * a.values[i] +
                              b.values[i] * b.values[i] +
                              c.values[i] * c.values[i]);
  return out;
}

PathSample sample_stable_bridge(const StableParams& p, double length,
                                double endpoint, int n_steps, double tolerance,
                                Rng& rng, double floor, long max_tries) {
  if (length <= 0.0) throw ConfigError("bridge length must be > 0");
  if (n_steps < 1) throw ConfigError("bridge n_steps must be >= 1");
  if (n_steps == 1) {
    PathSample out;
    out.duration = length;
    out.times = {0.0, length};
    out.values = {0.0, endpoint};
    return out;
  }
  const double body_scale = std::pow(p.cms_scale() * length, 1.0 / p.theta);
  const double half_width =
      tolerance * std::max(std::abs(endpoint), body_scale);
  long tries = 0;
  while (tries < max_tries) {
    ++tries;
    PathSample path = sample_stable(p, length, n_steps, rng);
    if (std::abs(path.values.back() - endpoint) <= half_width) return path;
    if (tries == 4096 && tries > 2.0 / std::max(floor, 1e-12)) break;
  }
  throw SamplingError(
      "sample_stable_bridge: acceptance below floor after " +
      std::to_string(tries) +
      " tries; widen `tolerance` or reduce |endpoint|/length mismatch");
}

}  // namespace sgf

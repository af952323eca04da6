#include "sgf/spine.hpp"

#include <algorithm>
#include <cmath>

#include "sgf/errors.hpp"
#include "sgf/quadrature.hpp"

namespace sgf {

namespace {

// natural (finite-variation) drift: spec.drift minus the compensator mass
double natural_drift(const LevySpec& spec) {
  if (!spec.has_jumps() || spec.comp == Compensator::none) return spec.drift;
  const Compensator comp = spec.comp;
  const double mass = levy_integral(spec, [comp](double y) {
    switch (comp) {
      case Compensator::linear_unit:
        return std::abs(y) < 1.0 ? y : 0.0;
      case Compensator::expm1_full:
        return std::expm1(y);
      case Compensator::expm1_unit: {
        const double e = std::expm1(y);
        return std::abs(e) < 1.0 ? e : 0.0;
      }
      default:
        return 0.0;
    }
  });
  return spec.drift - mass;
}

// one tilted side of the hat MAP: exp(omega x) Lambda_up(dx) plus the
// generation-jump component pushed forward from the cross-sign births
LevySpec tilted_side(const LevySpec& up, double omega, const std::string& name) {
  LevySpec hat;
  hat.name = name;
  const double b = natural_drift(up);
  hat.drift = b;
  hat.comp = Compensator::none;
  hat.killing_rate = 0.0;
  hat.small_jump_cutoff = up.small_jump_cutoff;
  const Interval sup = up.support;
  auto base = up.density;
  // x -> log(1 - e^x) maps the negative support onto (-inf, lo') reversing
  // orientation; the density transform carries e^x / (1 - e^x)
  double push_hi = -HUGE_VAL;
  if (sup.lo < 0.0) {
    const double edge = std::min(sup.hi, 0.0);
    push_hi = std::log(-std::expm1(std::max(sup.lo, -700.0)));
    if (edge < 0.0 && sup.lo < edge) {
      // upper end of the image comes from the most negative jumps
      push_hi = std::log(-std::expm1(std::max(sup.lo, -700.0)));
    }
  }
  hat.density = [base, sup, omega, push_hi](double x) {
    double v = 0.0;
    if (sup.contains(x)) v += std::exp(omega * x) * base(x);
    if (x < push_hi && x < 0.0) {
      const double src = std::log(-std::expm1(x));  // log(1 - e^x) < 0
      if (sup.contains(src)) {
        const double em1 = -std::expm1(x);  // 1 - e^x
        v += std::exp(omega * x) * base(src) * std::exp(x) / em1;
      }
    }
    return v;
  };
  hat.support.lo = -HUGE_VAL;
  hat.support.hi = std::isfinite(sup.hi) ? sup.hi : HUGE_VAL;
  hat.strip.lo = up.strip.lo - omega;
  hat.strip.hi = up.strip.hi - omega;
  return hat;
}

JumpLaw switch_law(const LevySpec& up, double omega, double norm,
                   const std::string& name) {
  // size-biased cross-sign birth: u = log(e^x - 1) for x > 0, density
  // proportional to e^{omega u} base(log(1+e^u)) e^u/(1+e^u)
  JumpLaw law;
  law.name = name;
  auto base = up.density;
  const Interval sup = up.support;
  law.density = [base, sup, omega](double u) {
    const double x = std::log1p(std::exp(std::min(u, 700.0)));
    if (!(x > 0.0) || !sup.contains(x)) return 0.0;
    const double eu = std::exp(u);
    return std::exp(omega * u) * base(x) * eu / (1.0 + eu);
  };
  law.density_support =
      Interval{-HUGE_VAL, std::isfinite(sup.hi)
                              ? std::log(std::expm1(sup.hi))
                              : HUGE_VAL};
  law.strip = Interval{-HUGE_VAL, HUGE_VAL};
  // sampler: tabulated on the two half-lines
  auto dens = law.density;
  const double lo = law.density_support.lo, hi = law.density_support.hi;
  auto neg = std::make_shared<TabulatedSampler>(
      [dens](double u) { return dens(-u); }, 1e-12, HUGE_VAL);
  std::shared_ptr<TabulatedSampler> pos;
  double p_neg = 1.0;
  if (hi > 1e-12) {
    pos = std::make_shared<TabulatedSampler>(dens, 1e-12,
                                             std::isfinite(hi) ? hi : HUGE_VAL);
    p_neg = neg->total_mass() / (neg->total_mass() + pos->total_mass());
  }
  law.sample = [neg, pos, p_neg](Rng& rng) {
    if (!pos || rng.bernoulli(p_neg)) return -neg->sample(rng);
    return pos->sample(rng);
  };
  (void)lo;
  (void)norm;
  return law;
}

}  // namespace

double SpineSpec::probe_grid_residual(const std::vector<double>& qs) const {
  const double w = triplet.omega;
  double worst = 0.0;
  for (double q : qs) {
    const Matrix2 f = matrix_exponent(hat_map, q);
    const double f11 = bundle.kappa_plus(w + q);
    const double f22 = bundle.kappa_minus(w + q);
    const double f12 = bundle.k_plus(w + q) - f11;
    const double f21 = bundle.k_minus(w + q) - f22;
    worst = std::max(worst, std::abs(f(0, 0) - f11));
    worst = std::max(worst, std::abs(f(0, 1) - f12));
    worst = std::max(worst, std::abs(f(1, 0) - f21));
    worst = std::max(worst, std::abs(f(1, 1) - f22));
  }
  return worst;
}

SpineSpec build_spine_spec(const CumulantBundle& bundle,
                           const AdmissibleTriplet& triplet, double alpha,
                           double residual_tol) {
  if (std::abs(triplet.residual_plus) > residual_tol ||
      std::abs(triplet.residual_minus) > residual_tol)
    throw ConfigError(
        "build_spine_spec: triplet residuals exceed the tolerance; refusing "
        "to assemble a spine from an inadmissible triplet");
  const MapSpec base = bundle.analysis->spec();
  const MapSpec up = base.constant_sign() ? base : flip_transform(base);
  const double w = triplet.omega;

  SpineSpec out;
  out.bundle = bundle;
  out.triplet = triplet;
  out.alpha = alpha;
  out.hat_map.name = base.name + "-spine";
  out.hat_map.xi_plus = tilted_side(up.xi_plus, w, base.name + "-hat+");
  out.hat_map.xi_minus = tilted_side(up.xi_minus, w, base.name + "-hat-");
  const double sp = bundle.analysis->sigma_tilde(+1, w);
  const double sm = bundle.analysis->sigma_tilde(-1, w);
  out.hat_map.q_plus = bundle.v_ratio * sp;
  out.hat_map.q_minus = sm / bundle.v_ratio;
  out.hat_map.u_plus = switch_law(up.xi_plus, w, sp, base.name + "-Uhat+");
  out.hat_map.u_minus = switch_law(up.xi_minus, w, sm, base.name + "-Uhat-");
  // laplace transforms of the switch jumps: sigma(w+q)/sigma(w)
  {
    auto analysis = bundle.analysis;
    const double norm_p = sp, norm_m = sm;
    out.hat_map.u_plus.laplace = [analysis, w, norm_p](double q) {
      return analysis->sigma_tilde(+1, w + q) / norm_p;
    };
    out.hat_map.u_minus.laplace = [analysis, w, norm_m](double q) {
      return analysis->sigma_tilde(-1, w + q) / norm_m;
    };
  }
  return out;
}

PathSample simulate_Y(const SpineSpec& spec, double z, double horizon,
                      int n_steps, Rng& rng) {
  SsmpSpec y;
  y.name = spec.hat_map.name;
  y.map = spec.hat_map;
  y.alpha = spec.alpha;
  y.start = z;
  SsmpSimulator sim(y);
  return sim.run(horizon, n_steps, rng);
}

int TaggedTrajectory::generation_at(double t) const {
  int n = 0;
  for (std::size_t i = 1; i < birth_times.size(); ++i)
    if (birth_times[i] <= t) n = static_cast<int>(i);
  return n;
}

TaggedTrajectory simulate_tagged_cell(const SsmpSimulator& sim,
                                      const AdmissibleTriplet& triplet,
                                      const TruncationPolicy& policy,
                                      Rng& rng) {
  TaggedTrajectory out;
  out.birth_times.push_back(0.0);
  out.ray.push_back({});
  double b = 0.0;
  double mass = sim.spec().start;
  const int max_generations = 100000;
  auto splice_until = [&out](const PathSample& cell, double offset,
                             double local_end) {
    for (std::size_t i = 0; i < cell.times.size(); ++i) {
      if (cell.times[i] >= local_end) break;
      const double t_abs = offset + cell.times[i];
      if (!out.values.times.empty() && t_abs <= out.values.times.back())
        continue;
      out.values.times.push_back(t_abs);
      out.values.values.push_back(cell.values[i]);
    }
    for (const Jump& j : cell.jumps) {
      if (j.time >= local_end) break;
      Jump g = j;
      g.time = offset + j.time;
      out.values.jumps.push_back(g);
    }
  };

  for (int gen = 0; gen < max_generations; ++gen) {
    const double remaining = policy.horizon - b;
    if (remaining <= 0.0) break;
    const double rel =
        policy.relative_cutoff * policy.mass_floor / std::abs(mass);
    const double hint = std::log1p(std::min(rel, 0.4));
    PathSample cell = sim.run_from(mass, remaining, policy.steps_per_cell,
                                   rng, hint);
    // selectable realised jumps plus the analytic weight of "no spine birth
    // before the horizon", which equals the martingale value at the horizon
    double m_floor = 0.0, m_below = 0.0;
    for (const Jump& j : cell.jumps) {
      const double child = -j.size;
      const double v = child > 0 ? triplet.v_plus : triplet.v_minus;
      const double wj = v * std::pow(std::abs(j.size), triplet.omega);
      if (std::abs(child) >= policy.mass_floor)
        m_floor += wj;
      else
        m_below += wj;
    }
    out.truncated_weight += m_below;
    double w_stay = 0.0;
    if (cell.alive) {
      const double x = cell.values.back();
      const double v = x > 0 ? triplet.v_plus : triplet.v_minus;
      w_stay = v * std::pow(std::abs(x), triplet.omega);
    }
    const double v_here = mass > 0 ? triplet.v_plus : triplet.v_minus;
    const double norm = v_here * std::pow(std::abs(mass), triplet.omega);
    if (m_floor + w_stay <= 0.0) {
      if (m_below > 0.0)
        throw SamplingError(
            "simulate_tagged_cell: all realised jumps fall below the mass "
            "floor; lower mass_floor or raise the jump resolution");
      // jumpless death: a tilted-law null set, carried with weight zero
      out.weight = 0.0;
      splice_until(cell, b, cell.duration + 1.0);
      out.values.duration = b + cell.duration;
      out.values.alive = false;
      return out;
    }
    out.weight *= (m_floor + w_stay) / norm;
    double target = rng.u01() * (m_floor + w_stay);
    if (target >= m_floor) {
      // spine stays in this cell through the horizon
      splice_until(cell, b, cell.duration + 1.0);
      out.values.duration = policy.horizon;
      out.values.alive = cell.alive;
      out.reached_horizon = cell.alive;
      if (!out.values.times.empty() &&
          out.values.times.back() < policy.horizon && cell.alive) {
        out.values.times.push_back(policy.horizon);
        out.values.values.push_back(cell.values.back());
      }
      return out;
    }
    // pick the child proportionally to its weight
    const Jump* picked = nullptr;
    std::vector<const Jump*> eligible;
    for (const Jump& j : cell.jumps)
      if (std::abs(j.size) >= policy.mass_floor) eligible.push_back(&j);
    for (const Jump* j : eligible) {
      const double child = -j->size;
      const double v = child > 0 ? triplet.v_plus : triplet.v_minus;
      const double wj = v * std::pow(std::abs(j->size), triplet.omega);
      target -= wj;
      if (target <= 0.0) {
        picked = j;
        break;
      }
    }
    if (!picked) picked = eligible.back();
    // rank in the |mass| ordering used for tree labels
    int rank = 1;
    for (const Jump* j : eligible) {
      if (j == picked) continue;
      const double mj = std::abs(j->size), mp = std::abs(picked->size);
      if (mj > mp || (mj == mp && j->time < picked->time)) ++rank;
    }

    splice_until(cell, b, picked->time);
    Jump birth;
    birth.time = b + picked->time;
    birth.value_before = picked->value_before;
    birth.size = -picked->size - picked->value_before;
    birth.sign_flip = (picked->value_before * (-picked->size)) < 0.0;
    out.values.jumps.push_back(birth);

    b += picked->time;
    mass = -picked->size;
    std::vector<int> label = out.ray.back();
    label.push_back(rank);
    out.ray.push_back(std::move(label));
    out.birth_times.push_back(b);
    const double t_post = b * (1.0 + 1e-15) + 1e-300;
    if (out.values.times.empty() || t_post > out.values.times.back()) {
      out.values.times.push_back(t_post);
      out.values.values.push_back(mass);
    }
  }
  out.values.duration = policy.horizon;
  out.values.alive = true;
  out.reached_horizon = true;
  if (out.values.times.empty() || out.values.times.back() < policy.horizon) {
    out.values.times.push_back(policy.horizon);
    out.values.values.push_back(mass);
  }
  return out;
}

SpineIdentityReport spine_temporal_identity_test(
    const SsmpSimulator& sim, const AdmissibleTriplet& triplet,
    const TruncationPolicy& policy,
    const std::function<double(double)>& weight_fn, double t, int n_samples,
    Rng& rng) {
  const double z = sim.spec().start;
  const double vz = (z > 0 ? triplet.v_plus : triplet.v_minus) *
                    std::pow(std::abs(z), triplet.omega);
  std::vector<double> lhs(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    const TaggedTrajectory tr = simulate_tagged_cell(sim, triplet, policy, rng);
    double f = 0.0;
    if (tr.reached_horizon || tr.values.duration >= t)
      f = weight_fn(tr.values.value_at(t));
    lhs[static_cast<std::size_t>(i)] = vz * tr.weight * f;
  }
  std::vector<double> rhs(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    const CellSystem sys = grow_cell_system(sim, policy, rng);
    const Snapshot snap = take_snapshot(sys, t);
    double s = 0.0;
    for (const SnapshotEntry& e : snap.entries) {
      const double v = e.mass > 0 ? triplet.v_plus : triplet.v_minus;
      s += v * std::pow(std::abs(e.mass), triplet.omega) * weight_fn(e.mass);
    }
    rhs[static_cast<std::size_t>(i)] = s;
  }
  const MeanSe ml = mean_se(lhs);
  const MeanSe mr = mean_se(rhs);
  SpineIdentityReport rep;
  rep.lhs = ml.mean;
  rep.lhs_se = ml.se;
  rep.rhs = mr.mean;
  rep.rhs_se = mr.se;
  rep.z_score = std::abs(ml.mean - mr.mean) /
                std::sqrt(ml.se * ml.se + mr.se * mr.se + 1e-300);
  return rep;
}

}  // namespace sgf

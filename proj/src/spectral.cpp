#include "sgf/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sgf/errors.hpp"
#include "sgf/quadrature.hpp"

namespace sgf {

PerronFrobenius2 perron_frobenius(const Matrix2& m) {
  if (!(m(0, 1) > 0.0) || !(m(1, 0) > 0.0))
    throw DomainError(
        "perron_frobenius: reducible matrix; the cell process must admit "
        "jumps of both signs (positive off-diagonal entries)");
  const double tr = m(0, 0) + m(1, 1);
  const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  const double disc = tr * tr - 4.0 * det;
  const double lam = 0.5 * (tr + std::sqrt(std::max(0.0, disc)));
  PerronFrobenius2 out;
  out.eigenvalue = lam;
  out.v_plus = 1.0;
  out.v_minus = (lam - m(0, 0)) / m(0, 1);
  if (!(out.v_minus > 0.0))
    throw DomainError("perron_frobenius: eigenvector not positive");
  return out;
}

std::pair<double, std::vector<double>> perron_frobenius(
    const std::vector<std::vector<double>>& m, double tol, int max_iter) {
  const std::size_t k = m.size();
  if (k == 0) throw ConfigError("perron_frobenius: empty matrix");
  for (const auto& row : m)
    if (row.size() != k) throw ConfigError("perron_frobenius: not square");
  if (k == 2) {
    Matrix2 m2;
    m2(0, 0) = m[0][0];
    m2(0, 1) = m[0][1];
    m2(1, 0) = m[1][0];
    m2(1, 1) = m[1][1];
    const PerronFrobenius2 r = perron_frobenius(m2);
    return {r.eigenvalue, {r.v_plus, r.v_minus}};
  }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (i != j && m[i][j] < 0.0)
        throw ConfigError("perron_frobenius: negative off-diagonal entry");
  // primitivity shift: iterate on m + cI
  double shift = 0.0;
  for (std::size_t i = 0; i < k; ++i) shift = std::max(shift, -m[i][i] + 1.0);
  std::vector<double> v(k, 1.0), w(k, 0.0);
  double lam = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    for (std::size_t i = 0; i < k; ++i) {
      double s = shift * v[i];
      for (std::size_t j = 0; j < k; ++j) s += m[i][j] * v[j];
      w[i] = s;
    }
    const double norm = w[0];
    if (!(norm > 0.0))
      throw DomainError(
          "perron_frobenius: iteration left the positive cone; matrix looks "
          "reducible (jumps of both signs required)");
    double diff = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      w[i] /= norm;
      diff = std::max(diff, std::abs(w[i] - v[i]));
    }
    v = w;
    lam = norm - shift;
    if (diff < tol) break;
  }
  for (double x : v)
    if (!(x > 0.0))
      throw DomainError("perron_frobenius: eigenvector not positive");
  return {lam, v};
}

// ---------------------------------------------------------------------------

namespace {

const LevySpec& xi_of(const MapSpec& s, int sign) {
  return sign > 0 ? s.xi_plus : s.xi_minus;
}
double switch_rate(const MapSpec& s, int sign) {
  return sign > 0 ? s.q_plus : s.q_minus;
}
const JumpLaw& u_of(const MapSpec& s, int sign) {
  return sign > 0 ? s.u_plus : s.u_minus;
}

double pow_expm1_abs(double x, double q) {
  return std::pow(std::abs(std::expm1(x)), q);
}

}  // namespace

SignAnalysis::SignAnalysis(const MapSpec& spec)
    : spec_(std::make_shared<MapSpec>(spec)) {
  spec_->validate();
}

double SignAnalysis::psi_up(int sign, double q) const {
  const LevySpec& xi = xi_of(*spec_, sign);
  const double rate = switch_rate(*spec_, sign);
  double out = laplace_exponent(xi, q);
  if (rate > 0.0) {
    // rate * (\int (1+e^u)^q Lambda_U(du) - 1)
    const JumpLaw& law = u_of(*spec_, sign);
    double g = 0.0;
    for (const auto& [loc, p] : law.atoms)
      g += p * std::pow(1.0 + std::exp(loc), q);
    if (law.density) {
      LevySpec tmp;
      tmp.density = law.density;
      tmp.support = law.density_support;
      tmp.name = law.name;
      g += levy_integral(tmp, [q](double u) {
        return std::pow(1.0 + std::exp(u), q);
      });
    }
    out += rate * (g - 1.0);
  }
  return out;
}

double SignAnalysis::jump_sum(int sign, int side, double q) const {
  const LevySpec& xi = xi_of(*spec_, sign);
  double out = 0.0;
  try {
    out = levy_integral_side(xi, side,
                             [q](double x) { return pow_expm1_abs(x, q); });
  } catch (const NumericError&) {
    throw DomainError("jump integral of |e^x-1|^q diverges at q = " +
                      std::to_string(q) + " (sign " + std::to_string(sign) +
                      ")");
  }
  if (!std::isfinite(out))
    throw DomainError("jump integral of |e^x-1|^q diverges at q = " +
                      std::to_string(q));
  if (side > 0) {
    // switch jumps land on the positive side of Lambda_up:
    // \int (1+e^u)^q - ... pushforward weight |e^{log(1+e^u)} - 1|^q = e^{qu}
    const double rate = switch_rate(*spec_, sign);
    if (rate > 0.0) out += rate * u_of(*spec_, sign).laplace(q);
  }
  return out;
}

double SignAnalysis::kappa(int sign, double q) const {
  return psi_up(sign, q) + jump_sum(sign, -1, q);
}

Matrix2 SignAnalysis::m_matrix(double q) const {
  Matrix2 m;
  for (int row = 0; row < 2; ++row) {
    const int sign = row == 0 ? +1 : -1;
    const double psi = psi_up(sign, q);
    if (!(psi < 0.0))
      throw DomainError(
          "m_matrix: psi_up(" + std::to_string(q) + ") = " +
          std::to_string(psi) +
          " >= 0, the expected child-weight sum is infinite at this q");
    // child sign = sign of -jump relative to the current cell sign: a jump of
    // the flipped positive process with x>0 makes a child of opposite type.
    const double same = -jump_sum(sign, -1, q) / psi;
    const double other = -jump_sum(sign, +1, q) / psi;
    const int col_same = row;
    const int col_other = 1 - row;
    m(row, col_same) = same;
    m(row, col_other) = other;
  }
  return m;
}

double SignAnalysis::lambda(double q) const {
  return std::log(perron_frobenius(m_matrix(q)).eigenvalue);
}

AdmissibleTriplet find_omega(const SignAnalysis& analysis, double lo,
                             double hi, const FindOmegaOptions& opt) {
  if (!(lo < hi)) throw ConfigError("find_omega: empty bracket");
  auto lam = [&](double q) { return analysis.lambda(q); };
  double f_lo = lam(lo);
  double f_hi = lam(hi);
  if (f_lo * f_hi > 0.0)
    throw DomainError("find_omega: lambda does not change sign on [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
  // scan for multiple sign changes (uniqueness is not guaranteed)
  int changes = 0;
  {
    double prev = f_lo;
    for (int i = 1; i <= opt.scan_points; ++i) {
      const double q = lo + (hi - lo) * i / opt.scan_points;
      const double v = (i == opt.scan_points) ? f_hi : lam(q);
      if (prev * v < 0.0) ++changes;
      prev = v;
    }
  }
  double a = lo, b = hi, fa = f_lo, fb = f_hi;
  double mid = 0.5 * (a + b);
  for (int it = 0; it < opt.max_iter; ++it) {
    // secant proposal, safeguarded by bisection
    double cand = (std::abs(fb - fa) > 1e-300)
                      ? b - fb * (b - a) / (fb - fa)
                      : 0.5 * (a + b);
    if (!(cand > a && cand < b)) cand = 0.5 * (a + b);
    const double fc = lam(cand);
    mid = cand;
    if (std::abs(fc) < opt.tol || (b - a) < 1e-15 * std::max(1.0, std::abs(b))) {
      break;
    }
    if (fa * fc <= 0.0) {
      b = cand;
      fb = fc;
    } else {
      a = cand;
      fa = fc;
    }
  }
  const double omega = mid;
  const PerronFrobenius2 pf = perron_frobenius(analysis.m_matrix(omega));
  AdmissibleTriplet t;
  t.omega = omega;
  t.v_plus = 1.0;
  t.v_minus = pf.v_minus;
  t.lambda_residual = lam(omega);
  t.sign_changes_on_scan = std::max(1, changes);
  const double kp = analysis.kappa(+1, omega);
  const double km = analysis.kappa(-1, omega);
  const double sp = analysis.sigma_tilde(+1, omega);
  const double sm = analysis.sigma_tilde(-1, omega);
  t.residual_plus = kp + t.v_ratio() * sp;
  t.residual_minus = km + sm / t.v_ratio();
  t.vratio_system_residual = t.v_ratio() + kp / sp;
  t.product_system_residual = kp * km - sp * sm;
  return t;
}

CumulantBundle make_bundle(std::shared_ptr<const SignAnalysis> analysis,
                           const AdmissibleTriplet& triplet) {
  CumulantBundle b;
  b.analysis = std::move(analysis);
  b.v_ratio = triplet.v_ratio();
  return b;
}

const char* to_string(MartingaleClass c) {
  switch (c) {
    case MartingaleClass::martingale:
      return "martingale";
    case MartingaleClass::strict_supermartingale:
      return "strict-supermartingale";
    default:
      return "undetermined";
  }
}

MartingaleClass classify_spine_martingale(const CumulantBundle& bundle,
                                          double omega, double alpha,
                                          double tol) {
  // Survival of the spine is governed by the long-run drift of its additive
  // part.  Between sign changes the drift is kappa±'(omega); sign changes
  // arrive at rates sigma±(omega) and carry jumps of mean sigma±'/sigma±.
  // The stationary average collapses to
  //   l = pi+ K+'(omega) + pi- K-'(omega),  pi ~ (sigma-, sigma+),
  // which reduces to the one-sided rule kappa'(omega) when no cross-sign
  // births occur.
  const double h = 1e-5 * std::max(1.0, std::abs(omega));
  const double dp =
      (bundle.kappa_plus(omega + h) - bundle.kappa_plus(omega - h)) / (2 * h);
  const double dm =
      (bundle.kappa_minus(omega + h) - bundle.kappa_minus(omega - h)) / (2 * h);
  double drift;
  const double sp = bundle.sigma_plus(omega);
  const double sm = bundle.sigma_minus(omega);
  if (sp > 0.0 && sm > 0.0) {
    const double dsp =
        (bundle.sigma_plus(omega + h) - bundle.sigma_plus(omega - h)) / (2 * h);
    const double dsm =
        (bundle.sigma_minus(omega + h) - bundle.sigma_minus(omega - h)) /
        (2 * h);
    const double pi_plus = sm / (sp + sm);
    drift = pi_plus * (dp + dsp) + (1.0 - pi_plus) * (dm + dsm);
  } else {
    drift = std::min(dp, dm);
  }
  const double a = alpha * drift;
  if (std::abs(a) < tol) return MartingaleClass::undetermined;
  return a > 0.0 ? MartingaleClass::martingale
                 : MartingaleClass::strict_supermartingale;
}

MapSpec flip_transform(const MapSpec& spec) {
  spec.validate();
  MapSpec out;
  out.name = spec.name + "-flipped";
  out.q_plus = 0.0;
  out.q_minus = 0.0;
  for (int sign : {+1, -1}) {
    const LevySpec& xi = xi_of(spec, sign);
    const double rate = switch_rate(spec, sign);
    LevySpec up = xi;
    up.name = xi.name + "-up";
    if (rate > 0.0) {
      const JumpLaw& law = u_of(spec, sign);
      if (!law.density)
        throw ConfigError(
            "flip_transform: U law needs a density to materialise the "
            "constant-sign pair (atoms are handled analytically only)");
      // pushforward of the U law by u -> log(1 + e^u), weighted by the rate
      auto pushed = [rate, d = law.density](double x) {
        if (x <= 0.0) return 0.0;
        const double em1 = std::expm1(x);
        return rate * d(std::log(em1)) * std::exp(x) / em1;
      };
      auto base = xi.density;
      const Interval bsup = xi.support;
      const double push_lo =
          std::log1p(std::exp(std::max(law.density_support.lo, -700.0)));
      const double push_hi =
          law.density_support.hi > 700.0
              ? HUGE_VAL
              : std::log1p(std::exp(law.density_support.hi));
      up.density = [base, bsup, pushed, push_lo, push_hi](double x) {
        double v = 0.0;
        if (base && bsup.contains(x)) v += base(x);
        if (x > push_lo && x < push_hi) v += pushed(x);
        return v;
      };
      up.support.lo = std::min(bsup.lo, push_lo);
      up.support.hi = std::max(bsup.hi, push_hi);
      up.strip.lo = std::max(xi.strip.lo, law.strip.lo);
      up.strip.hi = std::min(xi.strip.hi, law.strip.hi);
      // keep psi_up = psi + rate (G - 1): correct the compensator applied to
      // the pushforward part and the total mass it adds
      double comp_mass = 0.0;
      if (xi.comp != Compensator::none) {
        LevySpec tmp;
        tmp.density = pushed;
        tmp.support = Interval{push_lo, push_hi};
        const Compensator comp = xi.comp;
        comp_mass = levy_integral(tmp, [comp](double y) {
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
      }
      up.drift = xi.drift + comp_mass;
    }
    if (sign > 0)
      out.xi_plus = up;
    else
      out.xi_minus = up;
  }
  return out;
}

}  // namespace sgf

#include "sgf/stable_density.hpp"

#include <algorithm>
#include <cmath>

#include "sgf/errors.hpp"
#include "sgf/quadrature.hpp"
#include "sgf/special.hpp"

namespace sgf {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kLogTiny = -700.0;
}  // namespace

StableDensity::StableDensity(const StableParams& p) : params_(p) {
  alpha_ = p.theta;
  if (alpha_ >= 2.0) {
    // Gaussian case, kept for completeness: CF exp(-u^2) (variance 2)
    a_ = 1.0;
    d_ = 0.0;
    k_ = 1.0;
    phi_arg_ = 0.0;
  } else {
    const double t = std::tan(kPi * alpha_ / 2.0);
    a_ = p.cms_scale();
    d_ = a_ * p.beta() * t;  // phi(u) = exp(-a u^alpha + i d u^alpha), u > 0
    k_ = a_ * std::sqrt(1.0 + p.beta() * p.beta() * t * t);
    // -log phi = K u^alpha e^{-i Phi}: tan(Phi) = beta tan(pi alpha/2), and
    // the principal branch is the right one on both sides of alpha = 1
    phi_arg_ = std::atan(p.beta() * t);
  }

  // table over the core; beyond it the series/saddle representations are
  // already accurate to ~1e-9 relative
  const double scale = std::pow(a_, 1.0 / alpha_);
  x_hi_ = 40.0 * scale;
  x_lo_ = -40.0 * scale;
  const int n = 1601;
  grid_.resize(n);
  logp_.resize(n);
  for (int i = 0; i < n; ++i) {
    // clustered grid: uniform in signed sqrt coordinate
    const double u = -1.0 + 2.0 * i / (n - 1);
    const double x = (u >= 0 ? 1.0 : -1.0) * u * u * x_hi_;
    grid_[i] = x;
    const double v = pdf_fourier(x);
    logp_[i] = v > 0 ? std::log(v) : kLogTiny;
  }
  // The oscillatory inversion bottoms out at cancellation noise ~1e-16; on a
  // thin (spectrally one-sided) flank substitute the saddle-point branch
  // below a relative floor so the interpolant never sees noise.
  {
    const double logmax = *std::max_element(logp_.begin(), logp_.end());
    for (int i = 0; i < n; ++i) {
      if (logp_[i] > logmax - 30.0) continue;
      const int side = grid_[i] >= 0 ? +1 : -1;
      if (thin_side(side)) {
        logp_[i] = log_saddle(grid_[i], side);
      } else if (std::abs(grid_[i]) > 1e-6) {
        const double s = series_tail(grid_[i], side);
        logp_[i] = s > 0 ? std::log(s) : kLogTiny;
      }
    }
  }
  // endpoint-aware central-difference slopes for cubic Hermite interpolation
  slope_.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (i == 0)
      slope_[i] = (logp_[1] - logp_[0]) / (grid_[1] - grid_[0]);
    else if (i == n - 1)
      slope_[i] = (logp_[i] - logp_[i - 1]) / (grid_[i] - grid_[i - 1]);
    else
      slope_[i] = (logp_[i + 1] - logp_[i - 1]) / (grid_[i + 1] - grid_[i - 1]);
  }
  const auto it = std::max_element(logp_.begin(), logp_.end());
  mode_ = grid_[static_cast<std::size_t>(it - logp_.begin())];
  max_pdf_ = std::exp(*it);
}

double StableDensity::pdf_fourier(double x) const {
  if (alpha_ >= 2.0)
    return std::exp(-x * x / 4.0) / std::sqrt(4.0 * kPi);
  // p(x) = (1/pi) \int_0^inf e^{-a u^alpha} cos(d u^alpha - u x) du
  const double umax = std::pow(40.0 / a_, 1.0 / alpha_);
  QuadOptions opt;
  opt.rel_tol = 1e-12;
  opt.abs_tol = 1e-16;
  opt.throw_on_failure = false;
  auto f = [&](double u) {
    const double ua = std::pow(u, alpha_);
    return std::exp(-a_ * ua) * std::cos(d_ * ua - u * x);
  };
  // panel at the oscillation scale keeps the adaptive core efficient
  const double period = 2.0 * kPi / std::max(1.0, std::abs(x));
  double total = 0.0;
  double lo = 0.0;
  while (lo < umax) {
    const double hi = std::min(umax, lo + std::max(period, umax / 64.0));
    total += integrate(f, lo, hi, opt).value;
    lo = hi;
  }
  return std::max(0.0, total / kPi);
}

bool StableDensity::thin_side(int side) const {
  if (alpha_ >= 2.0) return true;
  const double b = params_.beta();
  return (side > 0 && b <= -0.999999) || (side < 0 && b >= 0.999999);
}

double StableDensity::series_tail(double x, int side) const {
  // p(x) ~ (1/pi) sum_k (-1)^{k+1} K^k Gamma(alpha k + 1)/k! *
  //        sin(k(Phi_side + pi alpha/2)) |x|^{-alpha k - 1}
  const double ax = std::abs(x);
  const double phi = (side > 0) ? phi_arg_ : -phi_arg_;
  double sum = 0.0, fact = 1.0, kpow = 1.0;
  double prev = HUGE_VAL;
  for (int k = 1; k <= 10; ++k) {
    fact *= k;
    kpow *= k_;
    const double term = (k % 2 ? 1.0 : -1.0) * kpow / fact *
                        gamma_fn(alpha_ * k + 1.0) *
                        std::sin(k * (phi + kPi * alpha_ / 2.0)) *
                        std::pow(ax, -alpha_ * k - 1.0);
    if (std::abs(term) > prev) break;  // asymptotic series: stop at smallest
    sum += term;
    prev = std::abs(term);
  }
  return std::max(0.0, sum / kPi);
}

double StableDensity::log_saddle(double x, int side) const {
  // spectrally one-sided thin tail via exponential change of measure:
  // log E e^{lam X} = K lam^alpha on the thin side
  const double ax = std::abs(x);
  if (alpha_ >= 2.0) return -x * x / 4.0 - 0.5 * std::log(4.0 * kPi);
  const double c = k_;
  const double lam = std::pow(ax / (alpha_ * c), 1.0 / (alpha_ - 1.0));
  const double rate = lam * ax - c * std::pow(lam, alpha_);
  const double psi2 = c * alpha_ * (alpha_ - 1.0) * std::pow(lam, alpha_ - 2.0);
  (void)side;
  return -rate - 0.5 * std::log(2.0 * kPi * psi2);
}

double StableDensity::log_pdf(double x) const {
  if (x >= x_lo_ && x <= x_hi_) {
    // cubic Hermite on the clustered grid
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - grid_.begin());
    if (i == 0) i = 1;
    if (i >= grid_.size()) i = grid_.size() - 1;
    --i;
    const double h = grid_[i + 1] - grid_[i];
    const double t = (x - grid_[i]) / h;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    const double h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t);
    const double h11 = t * t * (t - 1);
    const double lp = h00 * logp_[i] + h10 * h * slope_[i] +
                      h01 * logp_[i + 1] + h11 * h * slope_[i + 1];
    if (lp > kLogTiny + 100.0) return lp;
    // table underflow: fall through to the analytic tails
  }
  const int side = x >= 0 ? +1 : -1;
  if (thin_side(side)) return log_saddle(x, side);
  const double s = series_tail(x, side);
  return s > 0 ? std::log(s) : kLogTiny;
}

double StableDensity::pdf(double x) const {
  const double lp = log_pdf(x);
  return lp <= kLogTiny ? 0.0 : std::exp(lp);
}

double StableDensity::pdf_t(double t, double x) const {
  const double s = std::pow(t, -1.0 / alpha_);
  return s * pdf(s * x);
}

double StableDensity::log_pdf_t(double t, double x) const {
  const double s = std::pow(t, -1.0 / alpha_);
  return std::log(s) + log_pdf(s * x);
}

// ---------------------------------------------------------------------------

namespace {

// midpoint of a stable bridge over one dyadic cell: density proportional to
// p_h(x - a) p_h(b - x)
double conditional_midpoint(const StableDensity& d, const StableParams& p,
                            double h, double a, double b, Rng& rng) {
  const double inv = std::pow(h, -1.0 / p.theta);
  const double log_h = std::log(inv);
  const double log_max = log_h + std::log(d.max_pdf());
  auto log_ph = [&](double y) { return log_h + d.log_pdf(inv * y); };

  const double gap = b - a;
  const double w = inv * gap;  // standardised gap
  const bool thin_gap =
      (p.theta < 2.0) &&
      ((w > 6.0 && p.beta() <= -0.999999) || (w < -6.0 && p.beta() >= 0.999999));
  if (thin_gap || p.theta >= 2.0) {
    // both factors are in the exponential regime: the conditional midpoint is
    // Gaussian around gap/2 to leading order
    double var;
    if (p.theta >= 2.0) {
      var = h;  // CF exp(-u^2): variance 2h per half, conditioned: h
    } else {
      const double c = d.params().cms_scale() /
                       std::abs(std::cos(kPi * p.theta / 2.0));
      const double lam =
          std::pow(std::abs(gap / 2.0) / (p.theta * c * h), 1.0 / (p.theta - 1.0));
      const double psi2 =
          h * c * p.theta * (p.theta - 1.0) * std::pow(lam, p.theta - 2.0);
      var = psi2 / 2.0;
    }
    return a + gap / 2.0 + std::sqrt(std::max(var, 1e-300)) * rng.normal();
  }

  for (int tries = 0; tries < 200000; ++tries) {
    const double inc = stable_increment(p, h, rng);
    const double x = rng.bernoulli(0.5) ? a + inc : b - inc;
    const double lga = log_ph(x - a);
    const double lgb = log_ph(b - x);
    const double lm = std::max(lga, lgb) +
                      std::log1p(std::exp(-std::abs(lga - lgb))) -
                      std::log(2.0);
    // accept w.p. g / (M m), M = 2 p_h^max
    const double log_ratio = lga + lgb - (std::log(2.0) + log_max + lm);
    if (std::log(rng.u01()) < log_ratio) return x;
  }
  // pathological cell: fall back to the Gaussian midpoint
  return a + gap / 2.0 + std::pow(h, 1.0 / p.theta) * rng.normal();
}

}  // namespace

PathSample sample_stable_bridge_dyadic(const StableDensity& d, double length,
                                       double x0, double x1, int n_steps,
                                       Rng& rng) {
  if (length <= 0.0) throw ConfigError("dyadic bridge: length must be > 0");
  int levels = 0;
  while ((1 << levels) < n_steps) ++levels;
  const int n = 1 << levels;
  PathSample out;
  out.duration = length;
  out.times.resize(n + 1);
  out.values.assign(n + 1, 0.0);
  for (int i = 0; i <= n; ++i) out.times[i] = length * i / n;
  out.values[0] = x0;
  out.values[n] = x1;
  const StableParams& p = d.params();
  for (int lv = 0; lv < levels; ++lv) {
    const int stride = n >> lv;
    const double h = length * stride / (2.0 * n);
    for (int i = 0; i < n; i += stride) {
      const double a = out.values[i];
      const double b = out.values[i + stride];
      out.values[i + stride / 2] = conditional_midpoint(d, p, h, a, b, rng);
    }
  }
  return out;
}

}  // namespace sgf

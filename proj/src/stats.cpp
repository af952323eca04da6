#include "sgf/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sgf/errors.hpp"

namespace sgf {

MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe out;
  out.n = xs.size();
  if (xs.empty()) return out;
  double s = 0.0;
  for (double x : xs) s += x;
  out.mean = s / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) {
    const double d = x - out.mean;
    ss += d * d;
  }
  if (xs.size() > 1)
    out.se = std::sqrt(ss / (static_cast<double>(xs.size()) *
                             (static_cast<double>(xs.size()) - 1.0)));
  return out;
}

double z_score(const MeanSe& m, double target) {
  if (m.se == 0.0) return m.mean == target ? 0.0 : HUGE_VAL;
  return std::abs(m.mean - target) / m.se;
}

double kolmogorov_q(double d) {
  if (d <= 0.0) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * d * d);
    s += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::min(1.0, std::max(0.0, 2.0 * s));
}

double ks_critical(double n_eff_x, double n_eff_y, double alpha) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  return c * std::sqrt((n_eff_x + n_eff_y) / (n_eff_x * n_eff_y));
}

KsResult ks_two_sample_weighted(std::vector<double> xs, std::vector<double> wx,
                                std::vector<double> ys) {
  if (xs.empty() || ys.empty())
    throw ConfigError("ks_two_sample: empty sample");
  if (wx.empty()) wx.assign(xs.size(), 1.0);
  if (wx.size() != xs.size())
    throw ConfigError("ks_two_sample: weight/sample size mismatch");

  std::vector<std::size_t> ix(xs.size());
  std::iota(ix.begin(), ix.end(), 0);
  std::sort(ix.begin(), ix.end(),
            [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::sort(ys.begin(), ys.end());

  double wsum = 0.0, wsq = 0.0;
  for (double w : wx) {
    wsum += w;
    wsq += w * w;
  }

  KsResult out;
  out.n_eff_x = wsum * wsum / wsq;
  out.n_eff_y = static_cast<double>(ys.size());

  double fx = 0.0;
  double d = 0.0;
  std::size_t j = 0;
  const double m = static_cast<double>(ys.size());
  for (std::size_t k = 0; k < ix.size(); ++k) {
    const double x = xs[ix[k]];
    while (j < ys.size() && ys[j] < x) {
      ++j;
      d = std::max(d, std::abs(static_cast<double>(j) / m - fx));
    }
    fx += wx[ix[k]] / wsum;
    d = std::max(d, std::abs(static_cast<double>(j) / m - fx));
  }
  while (j < ys.size()) {
    ++j;
    d = std::max(d, std::abs(static_cast<double>(j) / m - fx));
  }
  out.statistic = d;
  out.critical_1pct = ks_critical(out.n_eff_x, out.n_eff_y, 0.01);
  const double ne = out.n_eff_x * out.n_eff_y / (out.n_eff_x + out.n_eff_y);
  out.p_value = kolmogorov_q(std::sqrt(ne) * d);
  return out;
}

KsResult ks_two_sample(std::vector<double> xs, std::vector<double> ys) {
  return ks_two_sample_weighted(std::move(xs), {}, std::move(ys));
}

Correlation pearson(const std::vector<double>& xs,
                    const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 3)
    throw ConfigError("pearson: need two equal samples of size >= 3");
  const MeanSe mx = mean_se(xs), my = mean_se(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double a = xs[i] - mx.mean, b = ys[i] - my.mean;
    sxy += a * b;
    sxx += a * a;
    syy += b * b;
  }
  Correlation c;
  c.n = xs.size();
  c.r = sxy / std::sqrt(sxx * syy);
  c.se = 1.0 / std::sqrt(static_cast<double>(xs.size()));
  return c;
}

}  // namespace sgf

#ifndef SGF_STATS_HPP
#define SGF_STATS_HPP

#include <cstddef>
#include <vector>

namespace sgf {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

MeanSe mean_se(const std::vector<double>& xs);

// |mean - target| expressed in standard errors.
double z_score(const MeanSe& m, double target);

struct KsResult {
  double statistic = 0.0;
  double critical_1pct = 0.0;
  double p_value = 0.0;
  double n_eff_x = 0.0;  // effective sizes (Kish) -- equal to n for unweighted
  double n_eff_y = 0.0;
  bool pass_1pct() const { return statistic < critical_1pct; }
};

KsResult ks_two_sample(std::vector<double> xs, std::vector<double> ys);

// Weighted x-sample against unweighted y-sample; the x weights are
// self-normalised and the critical value uses the Kish effective size.
KsResult ks_two_sample_weighted(std::vector<double> xs,
                                std::vector<double> wx,
                                std::vector<double> ys);

// Asymptotic two-sided critical value c(alpha) * sqrt((n+m)/(n m)).
double ks_critical(double n_eff_x, double n_eff_y, double alpha);

// Kolmogorov distribution tail Q(d) = P(K > d).
double kolmogorov_q(double d);

struct Correlation {
  double r = 0.0;
  double se = 0.0;  // ~ 1/sqrt(n) under independence
  std::size_t n = 0;
};

Correlation pearson(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace sgf

#endif

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracle_gamma.hpp"
#include "sgf/errors.hpp"
#include "sgf/quadrature.hpp"
#include "sgf/rng.hpp"
#include "sgf/special.hpp"
#include "sgf/stats.hpp"

using namespace sgf;

TEST_CASE("adaptive quadrature on smooth and singular integrands") {
  QuadOptions opt;
  const double one = integrate([](double x) { return 3.0 * x * x; }, 0.0, 1.0,
                               opt)
                         .value;
  CHECK(one == doctest::Approx(1.0).epsilon(1e-12));
  // \int_0^inf e^{-x} = 1
  const double e1 =
      integrate_right_tail([](double x) { return std::exp(-x); }, 0.0, 1.0,
                           opt)
          .value;
  CHECK(e1 == doctest::Approx(1.0).epsilon(1e-10));
  // \int_0^1 x^{-1/2} = 2
  const double s = integrate_endpoint_singular(
                       [](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                       0.0, opt)
                       .value;
  CHECK(s == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("gamma and beta wrappers") {
  CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-14));
  CHECK_THROWS_AS(gamma_fn(-2.0), DomainError);
  CHECK(beta_fn(2.0, 3.0) == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
  // against the independent implementation
  for (double x : {0.25, 0.75, 1.75, 2.5, -0.75, -1.5}) {
    CHECK(gamma_fn(x) ==
          doctest::Approx(oracle::spouge_gamma(x)).epsilon(1e-11));
  }
}

TEST_CASE("incomplete beta at one half: direct values") {
  // B_{1/2}(1,1) = 1/2
  CHECK(incomplete_beta_half(1.0, 1.0) ==
        doctest::Approx(0.5).epsilon(1e-12));
  // B_{1/2}(1,-t) = (2^t - 1)/t
  const double t = 0.75;
  CHECK(incomplete_beta_half(1.0, -t) ==
        doctest::Approx((std::pow(2.0, t) - 1.0) / t).epsilon(1e-11));
}

TEST_CASE("incomplete beta symmetry identity B(q,q) = Gamma(q)^2/(2 Gamma(2q))") {
  for (double q : {0.3, -0.75}) {
    const double lhs = incomplete_beta_half(q, q);
    const double rhs = oracle::spouge_gamma(q) * oracle::spouge_gamma(q) /
                       (2.0 * oracle::spouge_gamma(2.0 * q));
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("incomplete beta recursion identity") {
  // a B(a, b+1) - b B(a+1, b) = 2^{-a-b}
  for (auto [a, b] : {std::pair{-0.75, -0.75}, {0.4, -0.3}, {1.3, 2.2}}) {
    const double lhs = a * incomplete_beta_half(a, b + 1.0) -
                       b * incomplete_beta_half(a + 1.0, b);
    CHECK(std::abs(lhs - std::pow(2.0, -a - b)) < 1e-12);
  }
}

TEST_CASE("incomplete beta pole") {
  CHECK_THROWS_AS(incomplete_beta_half(0.0, 0.5), DomainError);
  CHECK_THROWS_AS(incomplete_beta_half(-2.0, 0.5), DomainError);
}

TEST_CASE("rng determinism and moments") {
  Rng a(42, 3), b(42, 3), c(42, 4);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.u01() == b.u01());
  }
  CHECK(a.u01() != c.u01());
  Rng r(7);
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    s += x;
    s2 += x * x;
  }
  CHECK(std::abs(s / n) < 4.0 / std::sqrt(double(n)));
  CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("two-sample KS statistic basics") {
  std::vector<double> xs, ys;
  Rng r(1);
  for (int i = 0; i < 4000; ++i) {
    xs.push_back(r.normal());
    ys.push_back(r.normal());
  }
  const KsResult same = ks_two_sample(xs, ys);
  CHECK(same.pass_1pct());
  for (auto& y : ys) y += 0.5;
  const KsResult shifted = ks_two_sample(xs, ys);
  CHECK(!shifted.pass_1pct());
  // critical value formula sanity: c(0.01) ~ 1.6276
  CHECK(ks_critical(1e4, 1e4, 0.01) ==
        doctest::Approx(1.6276 * std::sqrt(2.0 / 1e4)).epsilon(1e-3));
}

TEST_CASE("weighted KS reduces to plain KS at unit weights") {
  std::vector<double> xs, ys, w;
  Rng r(2);
  for (int i = 0; i < 1000; ++i) {
    xs.push_back(r.u01());
    ys.push_back(r.u01());
    w.push_back(1.0);
  }
  const KsResult a = ks_two_sample(xs, ys);
  const KsResult b = ks_two_sample_weighted(xs, w, ys);
  CHECK(a.statistic == doctest::Approx(b.statistic).epsilon(1e-12));
  CHECK(b.n_eff_x == doctest::Approx(1000.0).epsilon(1e-12));
}

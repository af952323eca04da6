#include "sgf/special.hpp"

#include <cmath>
#include <string>

#include "sgf/errors.hpp"
#include "sgf/quadrature.hpp"

namespace sgf {

bool near_nonpositive_integer(double x, double tol) {
  if (x > 0.5) return false;
  return std::abs(x - std::round(x)) < tol;
}

double gamma_fn(double x) {
  if (near_nonpositive_integer(x))
    throw DomainError("gamma_fn: pole at x = " + std::to_string(x));
  return std::tgamma(x);
}

double beta_fn(double a, double b) {
  if (near_nonpositive_integer(a + b)) return 0.0;  // 1/Gamma pole in the denominator
  return gamma_fn(a) * gamma_fn(b) / gamma_fn(a + b);
}

namespace {

// Direct integral, valid for a > 0 (any real b).  The substitution
// t = (1/2) u^{1/a} removes the t^{a-1} endpoint singularity:
//   B_{1/2}(a,b) = (2^{-a}/a) \int_0^1 (1 - u^{1/a}/2)^{b-1} du.
double b_half_direct(double a, double b) {
  const double inv_a = 1.0 / a;
  auto f = [&](double u) {
    const double t = 0.5 * std::pow(u, inv_a);
    return std::pow(1.0 - t, b - 1.0);
  };
  QuadOptions opt;
  opt.rel_tol = 1e-13;
  return std::pow(2.0, -a) * inv_a * integrate(f, 0.0, 1.0, opt).value;
}

}  // namespace

double incomplete_beta_half(double a, double b) {
  if (near_nonpositive_integer(a))
    throw DomainError("incomplete_beta_half: pole at a = " + std::to_string(a));
  if (a > 0.0) return b_half_direct(a, b);
  // B(a,b) = [2^{1-a-b} + (b-1) B(a+1, b-1)] / a, climbing until a > 0.
  return (std::pow(2.0, 1.0 - a - b) +
          (b - 1.0) * incomplete_beta_half(a + 1.0, b - 1.0)) /
         a;
}

}  // namespace sgf

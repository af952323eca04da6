#ifndef SGF_SPECIAL_HPP
#define SGF_SPECIAL_HPP

namespace sgf {

// Gamma(x) for real non-pole x (throws DomainError at 0, -1, -2, ...).
double gamma_fn(double x);

// Euler beta B(a,b) = Gamma(a)Gamma(b)/Gamma(a+b), meromorphic continuation.
double beta_fn(double a, double b);

// Incomplete beta at one half, B_{1/2}(a,b) = int_0^{1/2} t^{a-1}(1-t)^{b-1} dt,
// continued to a <= 0 (a not in -N) through the integration-by-parts identity
//   a B_{1/2}(a, b+1) - b B_{1/2}(a+1, b) = 2^{-a-b}.
double incomplete_beta_half(double a, double b);

bool near_nonpositive_integer(double x, double tol = 1e-9);

}  // namespace sgf

#endif

#ifndef SGF_QUADRATURE_HPP
#define SGF_QUADRATURE_HPP

#include <functional>

namespace sgf {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

struct QuadOptions {
  double rel_tol = 1e-11;
  double abs_tol = 1e-14;
  int max_depth = 48;
  bool throw_on_failure = true;
};

// Adaptive Gauss-Kronrod (7,15) on a finite interval.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& opt = {});

// \int_a^\infty f, via x = a + scale*t/(1-t).  `scale` should match the decay
// length of f; the adaptive core absorbs a mediocre guess.
QuadResult integrate_right_tail(const std::function<double(double)>& f,
                                double a, double scale = 1.0,
                                const QuadOptions& opt = {});

// \int_{-\infty}^b f
QuadResult integrate_left_tail(const std::function<double(double)>& f,
                               double b, double scale = 1.0,
                               const QuadOptions& opt = {});

// \int_a^b f where f may blow up (integrably) at the endpoint `sing`
// (= a or b).  Uses geometric subdivision toward the singular end.
QuadResult integrate_endpoint_singular(const std::function<double(double)>& f,
                                       double a, double b, double sing,
                                       const QuadOptions& opt = {});

}  // namespace sgf

#endif

#include "sgf/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "sgf/errors.hpp"

namespace sgf {
namespace {

// Gauss-Kronrod 7-15 nodes/weights on [-1,1].
const double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
const double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
const double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kXgk[i]);
    fv[14 - i] = f(c + h * kXgk[i]);
  }
  fv[7] = f(c);
  double res_k = 0.0, res_g = 0.0;
  for (int i = 0; i < 7; ++i) res_k += kWgk[i] * (fv[i] + fv[14 - i]);
  res_k += kWgk[7] * fv[7];
  for (int i = 0; i < 3; ++i) res_g += kWg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  res_g += kWg[3] * fv[7];
  Panel p;
  p.a = a;
  p.b = b;
  p.value = res_k * h;
  p.error = std::abs((res_k - res_g) * h);
  return p;
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& opt) {
  if (a == b) return {0.0, 0.0};
  std::vector<Panel> heap;
  heap.push_back(gk15(f, a, b));
  double total = heap[0].value, toterr = heap[0].error;
  auto cmp = [](const Panel& x, const Panel& y) { return x.error < y.error; };
  std::make_heap(heap.begin(), heap.end(), cmp);
  int evals = 1;
  const int max_panels = 1 << 14;
  while (toterr > std::max(opt.abs_tol, opt.rel_tol * std::abs(total)) &&
         static_cast<int>(heap.size()) < max_panels) {
    std::pop_heap(heap.begin(), heap.end(), cmp);
    Panel worst = heap.back();
    heap.pop_back();
    total -= worst.value;
    toterr -= worst.error;
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {  // interval exhausted
      total += worst.value;
      toterr += worst.error;
      break;
    }
    Panel left = gk15(f, worst.a, mid);
    Panel right = gk15(f, mid, worst.b);
    evals += 2;
    total += left.value + right.value;
    toterr += left.error + right.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), cmp);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), cmp);
  }
  if (!std::isfinite(total)) {
    if (opt.throw_on_failure)
      throw NumericError("quadrature diverged on [" + std::to_string(a) + "," +
                             std::to_string(b) + "]",
                         toterr);
    return {total, toterr};
  }
  if (toterr > std::max(opt.abs_tol, 100 * opt.rel_tol * std::abs(total)) &&
      opt.throw_on_failure) {
    throw NumericError("quadrature did not converge on [" + std::to_string(a) +
                           "," + std::to_string(b) + "]",
                       toterr);
  }
  return {total, toterr};
}

QuadResult integrate_right_tail(const std::function<double(double)>& f,
                                double a, double scale,
                                const QuadOptions& opt) {
  if (scale <= 0) scale = 1.0;
  auto g = [&](double t) {
    const double onemt = 1.0 - t;
    const double x = a + scale * t / onemt;
    return f(x) * scale / (onemt * onemt);
  };
  // open at t=1; stop a hair short, the decay of f makes the remainder nil
  return integrate(g, 0.0, 1.0 - 1e-14, opt);
}

QuadResult integrate_left_tail(const std::function<double(double)>& f, double b,
                               double scale, const QuadOptions& opt) {
  return integrate_right_tail([&, b](double u) { return f(b - u); }, 0.0,
                              scale, opt);
}

QuadResult integrate_endpoint_singular(const std::function<double(double)>& f,
                                       double a, double b, double sing,
                                       const QuadOptions& opt) {
  // Geometric panels shrinking toward the singular endpoint; each panel is
  // handled by the adaptive core.  Stops when panels stop contributing.
  const bool at_a = (sing == a);
  if (!at_a && sing != b)
    throw DomainError("integrate_endpoint_singular: sing must be an endpoint");
  const double len = b - a;
  double total = 0.0, err = 0.0;
  double hi = 1.0;  // fraction of |b-a| measured from the singular end
  QuadOptions inner = opt;
  inner.throw_on_failure = false;
  for (int k = 0; k < 60; ++k) {
    const double lo = hi / 8.0;
    double xa, xb;
    if (at_a) {
      xa = a + lo * len;
      xb = a + hi * len;
    } else {
      xa = b - hi * len;
      xb = b - lo * len;
    }
    QuadResult r = integrate(f, xa, xb, inner);
    total += r.value;
    err += r.error;
    hi = lo;
    if (std::abs(r.value) < opt.rel_tol * std::abs(total) + opt.abs_tol &&
        k > 4)
      break;
  }
  if (!std::isfinite(total) && opt.throw_on_failure)
    throw NumericError("endpoint-singular quadrature diverged", err);
  return {total, err};
}

}  // namespace sgf

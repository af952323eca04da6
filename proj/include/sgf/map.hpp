#ifndef SGF_MAP_HPP
#define SGF_MAP_HPP

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "sgf/levy.hpp"
#include "sgf/path.hpp"
#include "sgf/rng.hpp"

namespace sgf {

struct Matrix2 {
  // row-major: m[0]=a11, m[1]=a12, m[2]=a21, m[3]=a22
  std::array<double, 4> m{0, 0, 0, 0};
  double& operator()(int i, int j) { return m[2 * i + j]; }
  double operator()(int i, int j) const { return m[2 * i + j]; }
  Matrix2 operator*(const Matrix2& o) const;
  Matrix2 operator+(const Matrix2& o) const;
  Matrix2 operator*(double s) const;
  static Matrix2 identity();
};

// exp(M t) by scaling-and-squaring with a fixed-order Pade approximant
Matrix2 expm(const Matrix2& m, double t);

// Law of a switch jump: paired sampler and Laplace transform, plus an
// atom/density decomposition used by the analytic layer.  Consistency of the
// pair is a tested property, not an assumption.
struct JumpLaw {
  std::function<double(Rng&)> sample;
  std::function<double(double)> laplace;  // G(q) = E e^{qU}
  std::vector<std::pair<double, double>> atoms;  // (location, probability)
  std::function<double(double)> density;         // nullable
  Interval density_support;
  Interval strip;
  std::string name = "jump-law";

  bool valid() const { return static_cast<bool>(laplace); }

  static JumpLaw point_mass(double u0);
  // density ~ rate e^{-rate|u - shift|} restricted to u > shift (sign=+1)
  // or u < shift (sign=-1)
  static JumpLaw shifted_exponential(double rate, int sign, double shift);
};

// Two-state MAP: Levy dynamics per sign, switch rates q±, switch-jump laws.
struct MapSpec {
  LevySpec xi_plus;
  LevySpec xi_minus;
  double q_plus = 0.0;
  double q_minus = 0.0;
  JumpLaw u_plus;   // used when the modulator leaves +1
  JumpLaw u_minus;  // used when the modulator leaves -1
  std::string name = "map";

  bool constant_sign() const { return q_plus == 0.0 && q_minus == 0.0; }
  void validate() const;
};

struct MapPath {
  PathSample additive;               // xi component, switch jumps included
  std::vector<int> modulator;        // J on the same grid as additive.times
  std::vector<double> switch_times;  // ascending
  int start_state = +1;

  int state_at(double t) const;
};

// F(q) = diag(psi+(q) - q+, psi-(q) - q-) + offdiag(q+ G+-(q), q- G-+(q))
Matrix2 matrix_exponent(const MapSpec& spec, double q);

MapPath sample_map(const MapSpec& spec, int start_state, double horizon,
                   int n_steps, Rng& rng);

// Cached simulator for repeated path draws from one spec.
class MapSimulator {
 public:
  explicit MapSimulator(const MapSpec& spec);
  const MapSpec& spec() const { return *spec_; }
  MapPath run(int start_state, double horizon, int n_steps, Rng& rng) const;

 private:
  std::shared_ptr<const MapSpec> spec_;
  std::shared_ptr<const LevySimulator> plus_;
  std::shared_ptr<const LevySimulator> minus_;
};

}  // namespace sgf

#endif

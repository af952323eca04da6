#ifndef SGF_SPECTRAL_HPP
#define SGF_SPECTRAL_HPP

#include <memory>
#include <vector>

#include "sgf/map.hpp"

namespace sgf {

struct PerronFrobenius2 {
  double eigenvalue = 0.0;
  double v_plus = 1.0;  // eigenvector normalised to v+ = 1
  double v_minus = 1.0;
};

// 2x2 closed form; requires strictly positive off-diagonal entries
// (irreducible case: the driving process admits jumps of both signs).
PerronFrobenius2 perron_frobenius(const Matrix2& m);

// generic K: power iteration on the (shifted) nonnegative matrix
std::pair<double, std::vector<double>> perron_frobenius(
    const std::vector<std::vector<double>>& m, double tol = 1e-10,
    int max_iter = 200000);

// Analytic layer for one driving MapSpec, everything routed through the
// flipped constant-sign pair (psi_up, Lambda_up): cumulants kappa±, signed
// cumulants K±, the m matrix and its Perron-Frobenius data.
class SignAnalysis {
 public:
  explicit SignAnalysis(const MapSpec& spec);

  const MapSpec& spec() const { return *spec_; }

  // Laplace exponent of the flipped process xi_up
  double psi_up(int sign, double q) const;
  // \int over one side of Lambda_up_sign of |e^x - 1|^q
  // (side=+1 includes the switch-jump pushforward)
  double jump_sum(int sign, int side, double q) const;
  double sigma_tilde(int sign, double q) const { return jump_sum(sign, +1, q); }
  double kappa(int sign, double q) const;

  // m(q): expected child weight by child sign; throws DomainError when
  // psi_up(q) >= 0 (the expected sum is infinite) or an integral diverges.
  Matrix2 m_matrix(double q) const;
  double lambda(double q) const;  // log Perron-Frobenius eigenvalue

 private:
  std::shared_ptr<const MapSpec> spec_;
};

// Signed and classical cumulant functions at a fixed eigenvector ratio.
struct CumulantBundle {
  std::shared_ptr<const SignAnalysis> analysis;
  double v_ratio = 1.0;  // v- / v+

  double kappa_plus(double q) const { return analysis->kappa(+1, q); }
  double kappa_minus(double q) const { return analysis->kappa(-1, q); }
  double sigma_plus(double q) const {
    return v_ratio * analysis->sigma_tilde(+1, q);
  }
  double sigma_minus(double q) const {
    return analysis->sigma_tilde(-1, q) / v_ratio;
  }
  double k_plus(double q) const { return kappa_plus(q) + sigma_plus(q); }
  double k_minus(double q) const { return kappa_minus(q) + sigma_minus(q); }
};

struct AdmissibleTriplet {
  double v_plus = 1.0;
  double v_minus = 1.0;
  double omega = 0.0;
  double residual_plus = 0.0;          // K+(omega)
  double residual_minus = 0.0;         // K-(omega)
  double lambda_residual = 0.0;        // lambda(omega)
  double vratio_system_residual = 0.0; // v-/v+ + kappa+(w)/sigma~+(w)
  double product_system_residual = 0.0;// kappa+kappa- - sigma~+ sigma~-
  int sign_changes_on_scan = 1;        // > 1 means the root is not unique here
  double v_ratio() const { return v_minus / v_plus; }
};

struct FindOmegaOptions {
  double tol = 1e-10;
  int scan_points = 41;
  int max_iter = 200;
  double accept_residual = 1e-6;
};

// Root of lambda(q) on [lo, hi] with the Perron eigenvector at the root and
// the residuals of the two-equation cumulant system.
AdmissibleTriplet find_omega(const SignAnalysis& analysis, double lo,
                             double hi, const FindOmegaOptions& opt = {});

CumulantBundle make_bundle(std::shared_ptr<const SignAnalysis> analysis,
                           const AdmissibleTriplet& triplet);

enum class MartingaleClass { martingale, strict_supermartingale, undetermined };

const char* to_string(MartingaleClass c);

// Sign test on alpha kappa±'(omega) with a tolerance band around zero.
MartingaleClass classify_spine_martingale(const CumulantBundle& bundle,
                                          double omega, double alpha,
                                          double tol = 1e-4);

// Materialised constant-sign driving pair: the switch jumps are folded into
// the positive-side Levy densities via x -> log(1 + e^x).  Requires
// density-form U laws.
MapSpec flip_transform(const MapSpec& spec);

}  // namespace sgf

#endif

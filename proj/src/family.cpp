#include "sgf/family.hpp"

#include <cmath>
#include <memory>
#include <string>

#include "sgf/errors.hpp"
#include "sgf/quadrature.hpp"
#include "sgf/special.hpp"
#include "sgf/stable_density.hpp"

namespace sgf {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kLog2 = 0.69314718055994530942;
}  // namespace

double family_rho(double theta) { return 1.0 - 0.5 / theta; }

FamilyConstants family_constants(double theta) {
  if (!(theta > 0.5 && theta < 1.0))
    throw DomainError("family_constants: theta must lie in (1/2, 1), got " +
                      std::to_string(theta));
  FamilyConstants fc;
  fc.theta = theta;
  fc.alpha = 2.0 * theta;
  fc.c_plus = gamma_fn(1.0 + theta) / kPi;
  fc.c_minus = -gamma_fn(1.0 + theta) * std::cos(kPi * theta) / kPi;
  // sin(pi alpha (1 - rho)/2) = sin(pi/2) = 1 under theta(1 - rho) = 1/2
  fc.C_plus = fc.alpha * gamma_fn(theta) / (2.0 * std::sqrt(2.0) * kPi);
  fc.C_minus = -fc.C_plus * std::cos(kPi * theta);
  fc.d = fc.c_minus * beta_fn(1.0 - theta, 2.0 * theta) -
         fc.c_plus * incomplete_beta_half(1.0 - theta, -theta);
  fc.omega = 1.0 + theta;
  return fc;
}

double loc_largest_density(const FamilyConstants& fc, double y, bool mirror) {
  if (y <= -kLog2) return 0.0;
  const double cu = mirror ? fc.c_plus : fc.c_minus;   // y > 0 side
  const double cd = mirror ? fc.c_minus : fc.c_plus;   // y < 0 side
  const double em1 = std::expm1(y);
  if (em1 == 0.0) return HUGE_VAL;
  const double c = y > 0 ? cu : cd;
  return c * std::exp(-fc.theta * y) * std::pow(std::abs(em1), -1.0 - fc.theta);
}

LevySpec loc_largest_spec(const FamilyConstants& fc, bool mirror) {
  LevySpec spec;
  spec.name = mirror ? "loc-largest-mirror" : "loc-largest";
  const FamilyConstants cfc = fc;
  spec.density = [cfc, mirror](double y) {
    return loc_largest_density(cfc, y, mirror);
  };
  spec.support = Interval{-kLog2, HUGE_VAL};
  spec.comp = Compensator::expm1_full;
  spec.drift = mirror ? fc.c_plus * beta_fn(1.0 - fc.theta, 2.0 * fc.theta) -
                            fc.c_minus *
                                incomplete_beta_half(1.0 - fc.theta, -fc.theta)
                      : fc.d;
  // A negative fragment is killed at positive mass when its interval
  // collapses onto a jump of the (spectrally negative) real part; the rate is
  // fixed by the tilt normalisation of the mirrored killed exponent.  On the
  // positive side the same expression vanishes identically.
  spec.killing_rate = mirror ? fc.c_minus * incomplete_beta_half(-fc.theta,
                                                                 -fc.theta) -
                                   family_kappa_minus(fc.theta, 0.0)
                             : 0.0;
  spec.strip = Interval{-HUGE_VAL, 2.0 * fc.theta + 1.0};
  spec.small_jump_cutoff = 1e-4;
  return spec;
}

double psi_loc_largest(const FamilyConstants& fc, double q, bool mirror) {
  if (!(q < 2.0 * fc.theta + 1.0))
    throw DomainError("psi_loc_largest: needs q < 2 theta + 1 = " +
                      std::to_string(2.0 * fc.theta + 1.0));
  return laplace_exponent(loc_largest_spec(fc, mirror), q);
}

double psi0_hypergeometric(double theta, double q) {
  // reciprocal-gamma zeros at the denominator poles are genuine zeros of the
  // exponent; numerator poles (q in -N, q in theta + N) are true divergences
  if (near_nonpositive_integer(theta - q) || near_nonpositive_integer(1.0 + q))
    throw DomainError("psi0_hypergeometric: pole at q = " + std::to_string(q));
  auto rgamma = [](double x) {
    return near_nonpositive_integer(x) ? 0.0 : 1.0 / gamma_fn(x);
  };
  return -gamma_fn(theta - q) * gamma_fn(1.0 + q) * rgamma(0.5 - q) *
         rgamma(0.5 + q);
}

double psi0_quadrature(const FamilyConstants& fc, double q) {
  if (!(q > -1.0 && q < fc.theta))
    throw DomainError("psi0_quadrature: q outside (-1, theta)");
  LevySpec spec;
  spec.name = "killed-stable-exponent";
  const FamilyConstants cfc = fc;
  spec.density = [cfc](double y) {
    const double em1 = std::expm1(y);
    const double c = y > 0 ? cfc.c_minus : cfc.c_plus;
    return c * std::exp(y) * std::pow(std::abs(em1), -1.0 - cfc.theta);
  };
  spec.support = Interval{-HUGE_VAL, HUGE_VAL};
  spec.comp = Compensator::expm1_unit;
  spec.drift = (fc.c_minus - fc.c_plus) / (1.0 - fc.theta);
  spec.killing_rate = fc.c_plus / fc.theta;
  spec.strip = Interval{-1.0, fc.theta};
  return laplace_exponent(spec, q);
}

double psi_dprime_tail(const FamilyConstants& fc) {
  return fc.c_plus / fc.theta * (1.0 - std::pow(2.0, fc.theta));
}

double psi_second_continued(const FamilyConstants& fc, double q) {
  return fc.c_plus * incomplete_beta_half(q + 1.0, -fc.theta) +
         psi_dprime_tail(fc);
}

double psi_prime_at_tilt(const FamilyConstants& fc) {
  const double q = -1.0 - fc.theta;
  return psi0_hypergeometric(fc.theta, q) - psi_second_continued(fc, q);
}

double psi_loc_largest_gamma(const FamilyConstants& fc, double q) {
  return psi0_hypergeometric(fc.theta, q - 1.0 - fc.theta) -
         fc.c_plus * incomplete_beta_half(q - fc.theta, -fc.theta);
}

double family_kappa_plus(double theta, double q) {
  return gamma_fn(1.0 + 2.0 * theta - q) * gamma_fn(q - theta) *
         std::cos(kPi * (q - theta)) / kPi;
}

double family_kappa_minus(double theta, double q) {
  return -gamma_fn(1.0 + 2.0 * theta - q) * gamma_fn(q - theta) *
         std::cos(kPi * (2.0 * theta - q)) / kPi;
}

double family_jump_sum(const FamilyConstants& fc, int sign, int side,
                       double q) {
  if (!(q > fc.theta && q < 1.0 + 2.0 * fc.theta))
    throw DomainError("family_jump_sum: q outside (theta, 1+2theta)");
  const bool mirror = sign < 0;
  const double cu = mirror ? fc.c_plus : fc.c_minus;
  const double cd = mirror ? fc.c_minus : fc.c_plus;
  if (side > 0) return cu * beta_fn(1.0 + 2.0 * fc.theta - q, q - fc.theta);
  return cd * incomplete_beta_half(q - fc.theta, -fc.theta);
}

MapSpec family_cell_map(const FamilyConstants& fc) {
  MapSpec map;
  map.name = "family-theta-" + std::to_string(fc.theta);
  map.xi_plus = loc_largest_spec(fc, false);
  map.xi_minus = loc_largest_spec(fc, true);
  map.q_plus = 0.0;
  map.q_minus = 0.0;
  return map;
}

SsmpSpec family_cell_ssmp(const FamilyConstants& fc, double z) {
  SsmpSpec spec;
  spec.name = "family-cell";
  spec.map = family_cell_map(fc);
  spec.alpha = fc.theta;
  spec.start = z;
  return spec;
}

StableParams family_eta(double theta) { return StableParams::family(theta); }

StableParams family_spine_stable(double theta) {
  const FamilyConstants fc = family_constants(theta);
  return StableParams::from_constants(theta, 2.0 * fc.c_minus,
                                      2.0 * fc.c_plus);
}

StableParams real_part_params(double theta) {
  const double alpha = 2.0 * theta;
  return StableParams::from_rho(alpha, 1.0 - 1.0 / alpha);
}

double real_part_scale(double theta) {
  return std::pow(2.0, -0.5 / theta);
}

double family_C_quadrature(const FamilyConstants& fc, int sign) {
  static thread_local std::shared_ptr<StableDensity> cache;
  static thread_local double cache_theta = -1.0;
  if (!cache || cache_theta != fc.theta) {
    cache = std::make_shared<StableDensity>(real_part_params(fc.theta));
    cache_theta = fc.theta;
  }
  const StableDensity& dens = *cache;
  const double alpha = fc.alpha;
  const double s = sign > 0 ? 1.0 : -1.0;
  const double scale = std::pow(dens.params().cms_scale(), 1.0 / alpha);
  const double cut = 40.0 * scale;
  QuadOptions opt;
  opt.rel_tol = 1e-9;
  auto f = [&](double r) {
    return std::pow(r, 0.5 * alpha) * dens.pdf(s * r);
  };
  double total = integrate(f, 0.0, cut, opt).value;
  // beyond the table the density evaluates through its asymptotic series
  total += integrate_right_tail(f, cut, cut, opt).value;
  return alpha / (2.0 * std::sqrt(2.0 * kPi)) * total;
}

}  // namespace sgf

#ifndef SGF_FAMILY_HPP
#define SGF_FAMILY_HPP

#include "sgf/lamperti.hpp"
#include "sgf/levy.hpp"
#include "sgf/map.hpp"

namespace sgf {

// Closed-form constants of the distinguished excursion family at index
// theta in (1/2, 1), alpha = 2 theta:
//   c+ = Gamma(1+theta)/pi, c- = -Gamma(1+theta) cos(pi theta)/pi,
//   C+ = alpha Gamma(theta) / (2 sqrt(2) pi), C- = -C+ cos(pi theta),
//   d  = c- B(1-theta, 2 theta) - c+ B_{1/2}(1-theta, -theta),
//   omega = 1 + theta.
struct FamilyConstants {
  double theta = 0.0;
  double alpha = 0.0;
  double c_plus = 0.0;
  double c_minus = 0.0;
  double C_plus = 0.0;
  double C_minus = 0.0;
  double d = 0.0;
  double omega = 0.0;
};

FamilyConstants family_constants(double theta);

// positivity parameter rho = P(eta_1 < 0) = 1 - 1/(2 theta)
double family_rho(double theta);

// Levy density of the locally-largest Lamperti exponent on y > -log 2,
//   e^{-theta y} nu_theta(-(e^y - 1));  `mirror` swaps c+ and c-.
double loc_largest_density(const FamilyConstants& fc, double y, bool mirror);
LevySpec loc_largest_spec(const FamilyConstants& fc, bool mirror = false);

// Laplace exponent of the locally-largest evolution: quadrature route and
// the Gamma/incomplete-beta route (they must agree on q < 2 theta + 1).
double psi_loc_largest(const FamilyConstants& fc, double q,
                       bool mirror = false);
double psi_loc_largest_gamma(const FamilyConstants& fc, double q);

// Exponent of the stable process killed on becoming negative (the mirror
// Lamperti exponent): quadrature on (-1, theta) and the hypergeometric
// closed form -Gamma(theta - q) Gamma(1 + q) / (Gamma(1/2 - q) Gamma(1/2 + q)).
double psi0_quadrature(const FamilyConstants& fc, double q);
double psi0_hypergeometric(double theta, double q);

// Decomposition of the exponent at the tilt point: the removed big-jump part
// has mass -Psi''(inf) with Psi''(inf) = (c+/theta)(1 - 2^theta), and the
// continued small-jump-free exponent satisfies Psi'(-1-theta) = -Psi''(inf).
double psi_dprime_tail(const FamilyConstants& fc);
double psi_second_continued(const FamilyConstants& fc, double q);
double psi_prime_at_tilt(const FamilyConstants& fc);

// Closed-form cumulant functions of the family cell system (Gamma form):
//   kappa+(q) =  Gamma(1+2theta-q) Gamma(q-theta) cos(pi (q-theta)) / pi
//   kappa-(q) = -Gamma(1+2theta-q) Gamma(q-theta) cos(pi (2theta-q)) / pi
double family_kappa_plus(double theta, double q);
double family_kappa_minus(double theta, double q);

// closed-form one-sided jump sums of the family cell process:
//   \int_{x<0} Lambda(dx)(1-e^x)^q = c_down B_{1/2}(q-theta, -theta)
//   \int_{x>0} Lambda(dx)(e^x-1)^q = c_up   B(1+2theta-q, q-theta)
double family_jump_sum(const FamilyConstants& fc, int sign, int side, double q);

// Cell-system description: positive cells run the locally-largest exponent,
// negative cells its mirror; no sign changes of a single cell.
MapSpec family_cell_map(const FamilyConstants& fc);
SsmpSpec family_cell_ssmp(const FamilyConstants& fc, double z);

// eta: the theta-stable Levy process of the family
StableParams family_eta(double theta);
// spine reference law: sum of two independent mirrored copies, Levy
// constants (2 c-, 2 c+)
StableParams family_spine_stable(double theta);

// real part of the half-planar excursion: the normalised alpha-stable
// process with P(X < 0) = 1 - 1/alpha (no positive jumps), to be scaled by
// real_part_scale = 2^{-1/alpha} so that level cutting reproduces eta.
StableParams real_part_params(double theta);
double real_part_scale(double theta);

// quadrature of C_sign = (alpha/(2 sqrt(2 pi))) \int_0^inf r^{alpha/2}
// p_1(sign r) dr against the half-plane real-part density
double family_C_quadrature(const FamilyConstants& fc, int sign);

}  // namespace sgf

#endif

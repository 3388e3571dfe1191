#pragma once

// Free-energy densities for the two-phase mixture and the wall wetting
// energy, with their convex-concave splits.
//
// Bulk potential:  F_theta(s) = theta*F0(s) + F1(s),
//   F0(s)  = (1+s)ln(1+s) + (1-s)ln(1-s)        (convex, domain (-1,1))
//   F1(s)  = -(theta_c/2) s^2                    (concave)
// The kappa-regularised variant replaces F0 by a C^2 function F0k that
// coincides with F0 on [-1+kappa, 1-kappa] and continues quadratically
// (constant curvature F0''(1-kappa)) outside, so it is defined on all of R.
// The obstacle variant replaces theta*F0 by the indicator of [-1,1]; its
// force is handled by the active-set solver, not by a smooth derivative.
//
// Wall energy:  Ghat(s) interpolates the wetting coefficients,
// Ghat(1) = gamma1, Ghat(-1) = gamma2, either affinely or with a sine
// profile. It is split as Ghat(s) = (zeta/2) s^2 + G0(s) + G1(s) with G0
// convex (treated implicitly) and G1 concave (explicit).

#include <string>

#include "mpnsch/errors.hpp"

namespace mpnsch {

enum class PotentialKind { Logarithmic, KappaRegularised, Obstacle };

// Value/first/second derivative triple of a scalar potential.
struct PotentialEval {
  double F = 0.0;
  double dF = 0.0;
  double ddF = 0.0;
};

// Bulk free energy theta*F0 + F1 with its convex-concave split exposed.
struct SplitPotential {
  PotentialKind kind = PotentialKind::Logarithmic;
  double theta = 0.3;    // temperature factor on the convex part
  double theta_c = 1.0;  // critical temperature; F1(s) = -(theta_c/2)s^2
  double kappa = 0.1;    // regularisation width (KappaRegularised only)

  static SplitPotential logarithmic(double theta = 0.3, double theta_c = 1.0);
  static SplitPotential kappa_regularised(double theta = 0.3,
                                          double theta_c = 1.0,
                                          double kappa = 0.1);
  static SplitPotential obstacle(double theta_c = 1.0);

  // Full potential theta*F0(,k) + F1 and derivatives. Logarithmic kind
  // throws DomainError for |s| >= 1; Obstacle kind throws
  // UnsupportedPotential (no smooth representation).
  PotentialEval eval(double s) const;

  // Convex part theta*F0 (or theta*F0k) alone; same error behaviour.
  PotentialEval convex(double s) const;

  // Concave part F1 and derivatives; defined everywhere for every kind.
  double F1(double s) const { return -0.5 * theta_c * s * s; }
  double dF1(double s) const { return -theta_c * s; }
  double ddF1() const { return -theta_c; }

  bool singular_domain() const { return kind == PotentialKind::Logarithmic; }
};

// Convex part F0 of the logarithmic potential, with derivatives.
// Throws DomainError for |s| >= 1.
PotentialEval eval_log_convex(double s);

// Full logarithmic potential theta*F0(s) + F1(s). Throws DomainError for
// |s| >= 1.
PotentialEval eval_log(double s, double theta, double theta_c);

// C^2 kappa-regularised potential theta*F0k(s) + F1(s), defined on all R.
PotentialEval eval_kappa(double s, double kappa, double theta, double theta_c);

// Implicit-convex / explicit-concave chemical force
//   theta*F0'(phi_new) + F1'(phi_old)
// as used by the time-discrete chemical potential equation. Logarithmic
// kind throws DomainError when |phi_new| >= 1; Obstacle kind throws
// UnsupportedPotential (the multiplier replaces the convex force).
double chemical_force_split(double phi_new, double phi_old,
                            const SplitPotential& pot);

// Wall wetting energy Ghat with convex-concave split.
enum class WettingInterpolation { Affine, Sine };

struct BoundaryPotential {
  double zeta = 1.0;  // convex quadratic share of the wall energy, >= 0
  WettingInterpolation kind = WettingInterpolation::Affine;
  double gamma1 = 1.0;  // Ghat(+1)
  double gamma2 = 1.0;  // Ghat(-1)

  static BoundaryPotential affine(double gamma1, double gamma2,
                                  double zeta = 1.0);
  static BoundaryPotential sine(double gamma1, double gamma2,
                                double zeta = 1.0);

  // Interpolated wetting energy and its derivative.
  double Ghat(double s) const;
  double dGhat(double s) const;

  // Convex-split pieces of G = Ghat - (zeta/2)s^2 = G0 + G1:
  // Affine: G0 = 0. Sine: G0(s) = cplus*s^2 with cplus = (pi^2/8)|g1-g2|,
  // which makes G1 concave on all of R.
  double cplus() const;
  double G0(double s) const;
  double dG0(double s) const;
  double G1(double s) const { return Ghat(s) - 0.5 * zeta * s * s - G0(s); }
  double dG1(double s) const { return dGhat(s) - zeta * s - dG0(s); }
};

// Implicit/explicit wall force zeta*psi_new + G0'(psi_new) + G1'(psi_old)
// from the time-discrete wall chemical potential relation.
double boundary_force_split(double psi_new, double psi_old,
                            const BoundaryPotential& bp);

}  // namespace mpnsch

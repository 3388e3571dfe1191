#include "mpnsch/potentials.hpp"

#include <cmath>

namespace mpnsch {

namespace {

// F0 on (-1,1) without domain checks; callers guard.
PotentialEval f0_raw(double s) {
  PotentialEval e;
  e.F = (1.0 + s) * std::log1p(s) + (1.0 - s) * std::log1p(-s);
  e.dF = std::log1p(s) - std::log1p(-s);  // ln((1+s)/(1-s))
  e.ddF = 2.0 / (1.0 - s * s);
  return e;
}

// C^2 regularisation of F0: identical on [-1+kappa, 1-kappa], quadratic
// continuation with curvature F0''(1-kappa) outside. Even in s.
PotentialEval f0_kappa(double s, double kappa) {
  const double a = 1.0 - kappa;
  const double as = std::abs(s);
  if (as <= a) return f0_raw(s);
  const PotentialEval at_a = f0_raw(a);
  const double d = as - a;
  PotentialEval e;
  e.F = at_a.F + at_a.dF * d + 0.5 * at_a.ddF * d * d;
  const double dmag = at_a.dF + at_a.ddF * d;
  e.dF = (s > 0.0) ? dmag : -dmag;
  e.ddF = at_a.ddF;
  return e;
}

void check_log_domain(double s) {
  if (!(std::abs(s) < 1.0))
    throw DomainError("logarithmic potential evaluated at s = " +
                      std::to_string(s) + " outside (-1,1)");
}

}  // namespace

SplitPotential SplitPotential::logarithmic(double theta, double theta_c) {
  SplitPotential p;
  p.kind = PotentialKind::Logarithmic;
  p.theta = theta;
  p.theta_c = theta_c;
  return p;
}

SplitPotential SplitPotential::kappa_regularised(double theta, double theta_c,
                                                 double kappa) {
  SplitPotential p;
  p.kind = PotentialKind::KappaRegularised;
  p.theta = theta;
  p.theta_c = theta_c;
  p.kappa = kappa;
  return p;
}

SplitPotential SplitPotential::obstacle(double theta_c) {
  SplitPotential p;
  p.kind = PotentialKind::Obstacle;
  p.theta = 0.0;
  p.theta_c = theta_c;
  return p;
}

PotentialEval SplitPotential::convex(double s) const {
  switch (kind) {
    case PotentialKind::Logarithmic: {
      check_log_domain(s);
      PotentialEval e = f0_raw(s);
      return {theta * e.F, theta * e.dF, theta * e.ddF};
    }
    case PotentialKind::KappaRegularised: {
      PotentialEval e = f0_kappa(s, kappa);
      return {theta * e.F, theta * e.dF, theta * e.ddF};
    }
    case PotentialKind::Obstacle:
      throw UnsupportedPotential(
          "obstacle potential has no smooth convex part; use the active-set "
          "solver");
  }
  return {};
}

PotentialEval SplitPotential::eval(double s) const {
  PotentialEval e = convex(s);
  e.F += F1(s);
  e.dF += dF1(s);
  e.ddF += ddF1();
  return e;
}

PotentialEval eval_log_convex(double s) {
  check_log_domain(s);
  return f0_raw(s);
}

PotentialEval eval_log(double s, double theta, double theta_c) {
  return SplitPotential::logarithmic(theta, theta_c).eval(s);
}

PotentialEval eval_kappa(double s, double kappa, double theta,
                         double theta_c) {
  return SplitPotential::kappa_regularised(theta, theta_c, kappa).eval(s);
}

double chemical_force_split(double phi_new, double phi_old,
                            const SplitPotential& pot) {
  if (pot.kind == PotentialKind::Obstacle)
    throw UnsupportedPotential(
        "chemical_force_split: obstacle force is a multiplier, not a "
        "derivative");
  return pot.convex(phi_new).dF + pot.dF1(phi_old);
}

BoundaryPotential BoundaryPotential::affine(double gamma1, double gamma2,
                                            double zeta) {
  BoundaryPotential b;
  b.kind = WettingInterpolation::Affine;
  b.gamma1 = gamma1;
  b.gamma2 = gamma2;
  b.zeta = zeta;
  return b;
}

BoundaryPotential BoundaryPotential::sine(double gamma1, double gamma2,
                                          double zeta) {
  BoundaryPotential b;
  b.kind = WettingInterpolation::Sine;
  b.gamma1 = gamma1;
  b.gamma2 = gamma2;
  b.zeta = zeta;
  return b;
}

double BoundaryPotential::Ghat(double s) const {
  const double mid = 0.5 * (gamma1 + gamma2);
  const double amp = 0.5 * (gamma1 - gamma2);
  if (kind == WettingInterpolation::Affine) return mid + amp * s;
  return mid + amp * std::sin(0.5 * M_PI * s);
}

double BoundaryPotential::dGhat(double s) const {
  const double amp = 0.5 * (gamma1 - gamma2);
  if (kind == WettingInterpolation::Affine) return amp;
  return amp * 0.5 * M_PI * std::cos(0.5 * M_PI * s);
}

double BoundaryPotential::cplus() const {
  if (kind == WettingInterpolation::Affine) return 0.0;
  return (M_PI * M_PI / 8.0) * std::abs(gamma1 - gamma2);
}

double BoundaryPotential::G0(double s) const { return cplus() * s * s; }

double BoundaryPotential::dG0(double s) const { return 2.0 * cplus() * s; }

double boundary_force_split(double psi_new, double psi_old,
                            const BoundaryPotential& bp) {
  return bp.zeta * psi_new + bp.dG0(psi_new) + bp.dG1(psi_old);
}

}  // namespace mpnsch

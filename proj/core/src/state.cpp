#include "mpnsch/state.hpp"

#include <algorithm>
#include <cmath>

namespace mpnsch {

namespace {

bool in_range(double x, double lo, double hi) { return x >= lo && x <= hi; }

void check_pair(const EndpointPair& a, double lo, double hi,
                const std::string& name, std::vector<std::string>& out) {
  if (!in_range(a.f1, lo, hi) || !in_range(a.f2, lo, hi))
    out.push_back(name + " endpoints (" + std::to_string(a.f1) + ", " +
                  std::to_string(a.f2) + ") outside [" + std::to_string(lo) +
                  ", " + std::to_string(hi) + "]");
}

// Effective blend width: shrunk so the extension never drops below
// rho0 = min(rho1,rho2)/2 (worst case exactly rho0 at full shrink).
double blend_width(const PhysParams& p) {
  const double contrast = 0.5 * std::abs(p.rho1 - p.rho2);
  if (contrast == 0.0) return p.delta_rho;
  return std::min(p.delta_rho, std::min(p.rho1, p.rho2) / (2.0 * contrast));
}

}  // namespace

void PhysParams::validate() const {
  std::vector<std::string> problems;
  if (!(rho1 > 0.0)) problems.push_back("rho1 must be positive");
  if (!(rho2 > 0.0)) problems.push_back("rho2 must be positive");
  check_pair(eta, k0, k1, "eta", problems);
  check_pair(mobility, k0, k1, "mobility", problems);
  // Micro-rotation coefficients may vanish (classical-fluid limit); their
  // admissibility is the Eringen inequalities plus the upper bound.
  check_pair(eta_r, 0.0, k1, "eta_r", problems);
  check_pair(c0, -k1, k1, "c0", problems);
  check_pair(cd, 0.0, k1, "cd", problems);
  check_pair(ca, -k1, k1, "ca", problems);
  for (bool first : {true, false}) {
    const double v0 = first ? c0.f1 : c0.f2;
    const double vd = first ? cd.f1 : cd.f2;
    const double va = first ? ca.f1 : ca.f2;
    EringenReport rep = eringen_check(v0, vd, va);
    if (!rep.valid)
      for (const auto& viol : rep.violations)
        problems.push_back(std::string("Eringen violation at phi = ") +
                           (first ? "+1" : "-1") + ": " + viol);
  }
  if (!(bpot.zeta >= 0.0)) problems.push_back("zeta must be nonnegative");
  if (!in_range(sigma, 0.0, 1.0)) problems.push_back("sigma must be in [0,1]");
  if (!in_range(eps_reg, 0.0, 1.0))
    problems.push_back("eps_reg must be in [0,1]");
  if (!(q > 4.0)) problems.push_back("q must exceed 4 (2D requires q > 2d)");
  if (!(kappa > 0.0 && kappa <= 1.0))
    problems.push_back("kappa must be in (0,1]");
  if (!(h > 0.0)) problems.push_back("time step h must be positive");
  if (!(delta_rho > 0.0 && delta_rho <= 0.5))
    problems.push_back("delta_rho must be in (0, 0.5]");
  if (pot.kind != PotentialKind::Obstacle) {
    if (!(pot.theta > 0.0)) problems.push_back("theta must be positive");
    if (!(pot.theta < pot.theta_c))
      problems.push_back("theta must be below theta_c (two-phase regime)");
  }
  if (!(pot.theta_c > 0.0)) problems.push_back("theta_c must be positive");
  if (pot.kind == PotentialKind::KappaRegularised &&
      !(pot.kappa > 0.0 && pot.kappa <= 1.0))
    problems.push_back("potential kappa must be in (0,1]");
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

Density density(double phi, const PhysParams& p) {
  const double mid = 0.5 * (p.rho1 + p.rho2);
  const double slope = 0.5 * (p.rho1 - p.rho2);
  if (std::abs(phi) <= 1.0) return {mid + slope * phi, slope};
  const double d = blend_width(p);
  const double t = std::min((std::abs(phi) - 1.0) / d, 1.0);
  // rho' = slope*(1 - S(t)); integrating S gives t - t^3 + t^4/2.
  const double integral = t - t * t * t + 0.5 * t * t * t * t;
  const double s = 3.0 * t * t - 2.0 * t * t * t;
  const double sign = (phi > 0.0) ? 1.0 : -1.0;
  Density out;
  out.rho = mid + slope * sign + sign * slope * d * integral;
  out.drho = (t < 1.0) ? slope * (1.0 - s) : 0.0;
  return out;
}

double density_floor(const PhysParams& p) {
  return 0.5 * std::min(p.rho1, p.rho2);
}

double interpolate_coeff(double phi, const EndpointPair& a) {
  const double c = std::clamp(phi, -1.0, 1.0);
  const double t = 0.5 * (c + 1.0);
  const double s = t * t * (3.0 - 2.0 * t);
  return a.f2 + (a.f1 - a.f2) * s;
}

EringenReport eringen_check(double c0, double cd, double ca) {
  EringenReport rep;
  auto fail = [&rep](const std::string& msg) {
    rep.valid = false;
    rep.violations.push_back(msg);
  };
  if (!(cd >= 0.0)) fail("cd >= 0 violated");
  if (!(ca + cd >= 0.0)) fail("ca + cd >= 0 violated");
  if (!(3.0 * c0 + 2.0 * cd >= 0.0)) fail("3*c0 + 2*cd >= 0 violated");
  if (!(std::abs(cd - ca) <= cd + ca)) fail("|cd - ca| <= cd + ca violated");
  return rep;
}

MixtureState MixtureState::make(const Grid& g) {
  MixtureState s;
  s.u = g.make_faces();
  s.p = g.make_cell();
  s.omega = g.make_cell();
  s.phi = g.make_cell();
  s.mu = g.make_cell();
  s.xi = g.make_cell();
  s.psi_bottom = g.make_boundary(Wall::Bottom);
  s.psi_top = g.make_boundary(Wall::Top);
  s.Lpsi_bottom = g.make_boundary(Wall::Bottom);
  s.Lpsi_top = g.make_boundary(Wall::Top);
  s.xi_bottom = g.make_boundary(Wall::Bottom);
  s.xi_top = g.make_boundary(Wall::Top);
  return s;
}

}  // namespace mpnsch

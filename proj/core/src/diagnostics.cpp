#include "mpnsch/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "mpnsch/potentials.hpp"
#include "scheme_detail.hpp"

namespace mpnsch {

namespace {

void check_finite(const std::vector<double>& v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x))
      throw InfeasibleState(std::string("non-finite value in ") + what);
}

void check_state_finite(const MixtureState& s) {
  check_finite(s.u.x.v, "u.x");
  check_finite(s.u.y.v, "u.y");
  check_finite(s.p.v, "p");
  check_finite(s.omega.v, "omega");
  check_finite(s.phi.v, "phi");
  check_finite(s.mu.v, "mu");
  check_finite(s.psi_bottom.v, "psi_bottom");
  check_finite(s.psi_top.v, "psi_top");
}

constexpr double kObstacleFeasTol = 1e-9;

}  // namespace

EnergyBreakdown total_energy(const Grid& g, const MixtureState& s,
                             const PhysParams& p) {
  require_size(s.phi.size(), g.cells(), "total_energy: phi");
  require_size(s.u.x.size(), g.xfaces(), "total_energy: u.x");
  require_size(s.u.y.size(), g.yfaces(), "total_energy: u.y");
  require_size(s.psi_bottom.size(), g.nx, "total_energy: psi_bottom");
  require_size(s.psi_top.size(), g.nx, "total_energy: psi_top");
  check_state_finite(s);

  const double dV = g.cell_volume();
  EnergyBreakdown e;

  const CellField rho_c = detail::cell_density(g, s.phi, p);
  const XFaceField rho_x = detail::xface_avg(g, rho_c);
  const YFaceField rho_y = detail::yface_avg_interior(g, rho_c);
  for (int k = 0; k < g.xfaces(); ++k)
    e.kinetic += 0.5 * rho_x[k] * s.u.x[k] * s.u.x[k] * dV;
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int k = g.yface(i, j);
      e.kinetic += 0.5 * rho_y[k] * s.u.y[k] * s.u.y[k] * dV;
    }
  for (int k = 0; k < g.cells(); ++k)
    e.micro_rotational += 0.5 * rho_c[k] * s.omega[k] * s.omega[k] * dV;

  e.bulk_gradient = detail::grad_energy_bulk(g, s.phi, s.psi_bottom, s.psi_top);

  if (p.pot.kind == PotentialKind::Obstacle) {
    for (int k = 0; k < g.cells(); ++k)
      if (std::abs(s.phi[k]) > 1.0 + kObstacleFeasTol)
        throw InfeasibleState("obstacle bound |phi| <= 1 violated, phi = " +
                              std::to_string(s.phi[k]));
    for (const BoundaryField* b : {&s.psi_bottom, &s.psi_top})
      for (int i = 0; i < g.nx; ++i)
        if (std::abs((*b)[i]) > 1.0 + kObstacleFeasTol)
          throw InfeasibleState("obstacle bound |psi| <= 1 violated");
    for (int k = 0; k < g.cells(); ++k)
      e.bulk_potential += p.pot.F1(s.phi[k]) * dV;
  } else {
    for (int k = 0; k < g.cells(); ++k)
      e.bulk_potential += p.pot.eval(s.phi[k]).F * dV;
  }

  e.surface_gradient = detail::grad_energy_surface(g, s.psi_bottom) +
                       detail::grad_energy_surface(g, s.psi_top);
  // (zeta/2) psi^2 + G(psi) recombines to the interpolated wetting energy.
  for (const BoundaryField* b : {&s.psi_bottom, &s.psi_top})
    for (int i = 0; i < g.nx; ++i)
      e.surface_potential += p.bpot.Ghat((*b)[i]) * g.dx;

  e.total = e.kinetic + e.micro_rotational + e.bulk_gradient +
            e.bulk_potential + e.surface_gradient + e.surface_potential;
  return e;
}

StepLedger step_ledger(const Grid& g, const MixtureState& state_k,
                       const MixtureState& state_new, const PhysParams& p,
                       double h, const LedgerFlags& flags) {
  const double dV = g.cell_volume();
  StepLedger out;
  DissipationBreakdown& d = out.dissipation;

  // Lagged coefficients, exactly as the step assembled them.
  const CellField m_k = detail::cell_coeff(g, state_k.phi, p.mobility);
  const CellField eta_k = detail::cell_coeff(g, state_k.phi, p.eta);
  const CellField etar_k = detail::cell_coeff(g, state_k.phi, p.eta_r);
  const CellField cd_k = detail::cell_coeff(g, state_k.phi, p.cd);
  const CellField ca_k = detail::cell_coeff(g, state_k.phi, p.ca);
  const CellField rho_k = detail::cell_density(g, state_k.phi, p);
  const XFaceField rho_kx = detail::xface_avg(g, rho_k);
  const YFaceField rho_ky = detail::yface_avg_interior(g, rho_k);

  d.chemical = detail::chemical_dissipation(g, m_k, state_new.mu);
  d.shear = detail::shear_dissipation(g, eta_k, state_new.u);
  d.exchange =
      detail::exchange_dissipation(g, etar_k, state_new.u, state_new.omega);
  d.micro_div = 0.0;  // div of the axial micro-rotation vanishes in 2D
  d.micro_sym = detail::micro_grad_dissipation(g, cd_k, state_new.omega);
  d.micro_skew = detail::micro_grad_dissipation(g, ca_k, state_new.omega);
  d.wall_slip = detail::wall_trace_sq_xface(g, state_new.u.x);
  d.wall_spin = detail::wall_trace_sq_cell(g, state_new.omega);
  d.wall_ac = flags.boundary_frozen
                  ? 0.0
                  : detail::boundary_sq(g, state_new.Lpsi_bottom) +
                        detail::boundary_sq(g, state_new.Lpsi_top);

  if (flags.sigma_on && p.sigma > 0.0) {
    double s2 = 0.0;
    for (int k = 0; k < g.cells(); ++k) {
      const double dphi = state_new.phi[k] - state_k.phi[k];
      s2 += dphi * dphi * dV;
    }
    d.sigma_extra = p.sigma / (h * h) * s2;
  }

  if (flags.eps_on && p.eps_reg > 0.0) {
    // At Picard convergence the lagged coefficient state coincides with the
    // converged fields to picard_tol; evaluate with the converged fields.
    const detail::QRegVel qu =
        detail::qreg_vel_coeffs(g, state_new.u, p.eps_reg, p.q);
    const detail::QRegRot qw =
        detail::qreg_rot_coeffs(g, state_new.omega, p.eps_reg, p.q);
    d.eps_extra = detail::qreg_vel_value(g, qu, state_new.u) +
                  detail::qreg_rot_value(g, qw, state_new.omega);
  }

  // Unscaled increment terms.
  double incr = 0.0;
  for (int k = 0; k < g.xfaces(); ++k) {
    const double du = state_new.u.x[k] - state_k.u.x[k];
    incr += 0.5 * rho_kx[k] * du * du * dV;
  }
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int k = g.yface(i, j);
      const double du = state_new.u.y[k] - state_k.u.y[k];
      incr += 0.5 * rho_ky[k] * du * du * dV;
    }
  for (int k = 0; k < g.cells(); ++k) {
    const double dw = state_new.omega[k] - state_k.omega[k];
    incr += 0.5 * rho_k[k] * dw * dw * dV;
  }
  CellField dphi = g.make_cell();
  for (int k = 0; k < g.cells(); ++k)
    dphi[k] = state_new.phi[k] - state_k.phi[k];
  BoundaryField dpsi_b = g.make_boundary(Wall::Bottom);
  BoundaryField dpsi_t = g.make_boundary(Wall::Top);
  for (int i = 0; i < g.nx; ++i) {
    dpsi_b[i] = state_new.psi_bottom[i] - state_k.psi_bottom[i];
    dpsi_t[i] = state_new.psi_top[i] - state_k.psi_top[i];
  }
  if (flags.boundary_frozen) {
    // No wall dynamics: the telescoped gradient energy is the interior one.
    incr += detail::grad_energy_bulk_interior(g, dphi);
  } else {
    incr += detail::grad_energy_bulk(g, dphi, dpsi_b, dpsi_t);
    incr += detail::grad_energy_surface(g, dpsi_b) +
            detail::grad_energy_surface(g, dpsi_t);
    incr += 0.5 * p.zeta() *
            (detail::boundary_sq(g, dpsi_b) + detail::boundary_sq(g, dpsi_t));
  }
  d.increment_extra = incr;

  if (p.body_force_x != 0.0)
    for (int k = 0; k < g.xfaces(); ++k)
      out.work_input += p.body_force_x * state_new.u.x[k] * dV;

  if (flags.boundary_frozen) {
    // Reduced (homogeneous-Neumann) energy: drop the wall half-faces and the
    // frozen surface terms, which do not telescope without wall dynamics.
    auto reduced = [&](const MixtureState& s) {
      const EnergyBreakdown e = total_energy(g, s, p);
      const double wall_half =
          e.bulk_gradient - detail::grad_energy_bulk_interior(g, s.phi);
      return e.total - e.surface_gradient - e.surface_potential - wall_half;
    };
    out.energy_old = reduced(state_k);
    out.energy_new = reduced(state_new);
  } else {
    out.energy_old = total_energy(g, state_k, p).total;
    out.energy_new = total_energy(g, state_new, p).total;
  }
  const double rates = d.chemical + d.shear + d.exchange + d.micro_div +
                       d.micro_sym + d.micro_skew + d.wall_slip + d.wall_spin +
                       d.wall_ac + d.sigma_extra + d.eps_extra;
  out.slack = out.energy_old + h * out.work_input - out.energy_new -
              d.increment_extra - h * rates;
  return out;
}

BoundsReport conservation_and_bounds(const Grid& g, const MixtureState& s,
                                     const MixtureState& s0,
                                     const PhysParams&) {
  BoundsReport r;
  const double dV = g.cell_volume();
  double mass0 = 0.0;
  for (int k = 0; k < g.cells(); ++k) {
    r.mass += s.phi[k] * dV;
    mass0 += s0.phi[k] * dV;
  }
  r.mass_drift = r.mass - mass0;
  r.phi_min = *std::min_element(s.phi.v.begin(), s.phi.v.end());
  r.phi_max = *std::max_element(s.phi.v.begin(), s.phi.v.end());
  r.psi_min = std::min(
      *std::min_element(s.psi_bottom.v.begin(), s.psi_bottom.v.end()),
      *std::min_element(s.psi_top.v.begin(), s.psi_top.v.end()));
  r.psi_max = std::max(
      *std::max_element(s.psi_bottom.v.begin(), s.psi_bottom.v.end()),
      *std::max_element(s.psi_top.v.begin(), s.psi_top.v.end()));
  const CellField div = divergence(g, s.u);
  for (int k = 0; k < g.cells(); ++k)
    r.div_u_inf = std::max(r.div_u_inf, std::abs(div[k]));
  for (int i = 0; i < g.nx; ++i) {
    r.wall_normal_inf =
        std::max(r.wall_normal_inf, std::abs(s.u.y[g.yface(i, 0)]));
    r.wall_normal_inf =
        std::max(r.wall_normal_inf, std::abs(s.u.y[g.yface(i, g.ny)]));
  }
  return r;
}

}  // namespace mpnsch

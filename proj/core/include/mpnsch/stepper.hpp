#pragma once

// Implicit time stepper: one step maps (u_k, omega_k, phi_k, psi_k) to the
// next time level through a Picard outer loop that alternates
//   (a) the Cahn-Hilliard / dynamic-boundary subsystem (Newton solve), and
//   (b) the coupled momentum / angular-momentum saddle solve with slip and
//       Young-stress wall terms,
// with lagged coefficients chosen so the converged fields satisfy the
// discrete energy inequality exactly (see diagnostics::step_ledger).

#include <utility>

#include "mpnsch/diagnostics.hpp"
#include "mpnsch/grid.hpp"
#include "mpnsch/linsolve.hpp"
#include "mpnsch/state.hpp"

namespace mpnsch {

struct StepConfig {
  double picard_tol = 1e-8;  // combined relative update tolerance
  int picard_max = 50;
  double newton_tol = 1e-10;
  int newton_max = 30;
  double under_relaxation = 1.0;  // applied to the frozen iterates, (0,1]
  bool enable_q_regulariser = false;
  bool enable_sigma_regulariser = false;
  // Hold psi fixed and drop the wall dynamics (reduced-model comparisons).
  bool freeze_boundary_data = false;
  // Skip the micro-rotation solve entirely (omega forced to 0; meaningful
  // for decoupling checks with eta_r = 0).
  bool solve_omega = true;
  SolveOptions lin;  // all inner linear solves

  void validate() const;
};

// Result of the phase-field / boundary subsystem solve.
struct ChResult {
  CellField phi, mu;
  BoundaryField psi_bottom, psi_top;
  BoundaryField Lpsi_bottom, Lpsi_top;
  // Obstacle-branch extras; zero for smooth potentials.
  CellField xi;
  BoundaryField xi_bottom, xi_top;
  int newton_iters = 0;
  int pdas_iters = 0;
  double residual = 0.0;      // final nonlinear residual (pointwise inf-norm)
  double lin_residual = 0.0;  // worst inner linear residual
};

// Solve the time-discrete Cahn-Hilliard system with dynamic boundary
// condition for (phi, mu, psi, L) at fixed transport velocity u_iter:
//   (phi - phi_k)/h + div(u_iter avg(phi_k)) - div(m(phi_k) grad mu) = 0
//   mu = -lap phi + theta F0'(phi) + F1'(phi_k) + (sigma_eff/h)(phi - phi_k)
//   (psi - psi_k)/h + u_tau . grad_G psi_k + L = 0
//   L = dnu phi + zeta psi + G0'(psi) + G1'(psi_k) - lap_G psi
// mu closes with zero wall flux; phi closes with the ghost trace psi.
ChResult ch_substep(const Grid& g, const MixtureState& state_k,
                    const FacePair& u_iter, const PhysParams& p,
                    const StepConfig& cfg);

// Diffusive relative flux J = -avg(rho'(phi_k) m(phi_k)) grad mu on faces.
struct FluxFields {
  FacePair J;
  CellField R;  // see flux_residual; zero when built by flux_fields alone
};
FluxFields flux_fields(const Grid& g, const CellField& phi_k,
                       const CellField& mu_new, const PhysParams& p);

// Diagnostic mass-closure residual
//   R = (rho(phi_new) - rho(phi_k))/h + div(rho(phi_k) u + J),
// machine-zero at Picard convergence while |phi_k| <= 1 (affine density).
CellField flux_residual(const Grid& g, const CellField& phi_k,
                        const CellField& phi_new, const FacePair& u,
                        const FacePair& J, const PhysParams& p, double h);

// One linear momentum/angular-momentum saddle solve with convection
// linearised at u_iter, flux transport frozen at J(phi_k, mu_new), and the
// time-derivative stabilisation evaluated with rho(phi_new).
struct MomentumResult {
  FacePair u;
  CellField omega;
  CellField p;
  double lin_residual = 0.0;
};
MomentumResult momentum_substep(const Grid& g, const MixtureState& state_k,
                                const ChResult& ch, const FacePair& u_iter,
                                const CellField& omega_iter,
                                const PhysParams& p, const StepConfig& cfg);

// Everything the driver wants to know about one accepted step.
struct StepReport {
  double t = 0.0;       // time after the step
  double h_used = 0.0;  // possibly halved step size
  int picard_iters = 0;
  int newton_iters = 0;  // summed over Picard iterations
  int pdas_iters = 0;    // summed active-set changes (obstacle runs)
  int halvings = 0;
  double picard_update = 0.0;     // final combined update norm
  double max_lin_residual = 0.0;  // worst linear residual of the step
  EnergyBreakdown energy;         // at the new state
  DissipationBreakdown dissipation;
  double slack = 0.0;
  double work_input = 0.0;
  double mass_drift_step = 0.0;  // int(phi_new - phi_k)
  double phi_min = 0.0, phi_max = 0.0;
  bool ledger_ok = true;
};

// Advance one step; dispatches the obstacle potential to the active-set
// branch. Throws PicardDiverged after exhausting the halving budget.
std::pair<MixtureState, StepReport> step(const Grid& g,
                                         const MixtureState& state_k,
                                         const PhysParams& p,
                                         const StepConfig& cfg);

}  // namespace mpnsch

#pragma once

// Energy functional, dissipation functional, per-step energy-inequality
// ledger, and conservation/bound monitors.
//
// The quadratures here mirror the stepper's bilinear forms exactly (same
// stencils, same lagged coefficients), so the per-step inequality
//
//   E(new) + increments + h * (dissipation terms) <= E(old) + h * work
//
// is an algebraic identity of the scheme up to linear-solver and Picard
// tolerances; the reported slack is the left-over nonnegative gap of the
// convex-concave splitting (plus obstacle multiplier terms).

#include "mpnsch/grid.hpp"
#include "mpnsch/state.hpp"

namespace mpnsch {

struct EnergyBreakdown {
  double kinetic = 0.0;           // int rho |u|^2 / 2
  double micro_rotational = 0.0;  // int rho |omega|^2 / 2
  double bulk_gradient = 0.0;     // int |grad phi|^2 / 2 (ghost closure)
  double bulk_potential = 0.0;    // int F(phi)
  double surface_gradient = 0.0;  // int_G |grad_G psi|^2 / 2
  double surface_potential = 0.0; // int_G (zeta/2) psi^2 + G(psi)
  double total = 0.0;
};

struct DissipationBreakdown {
  double chemical = 0.0;     // int m(phi_k) |grad mu|^2
  double shear = 0.0;        // int 2 eta |Du|^2
  double exchange = 0.0;     // int 4 eta_r |curl u / 2 - omega|^2
  double micro_div = 0.0;    // int c0 |div omega|^2 (identically 0 in 2D)
  double micro_sym = 0.0;    // int 2 cd |D omega|^2 = int cd |grad omega|^2
  double micro_skew = 0.0;   // int 2 ca |W omega|^2 = int ca |grad omega|^2
  double wall_slip = 0.0;    // int_G |u_tau|^2
  double wall_spin = 0.0;    // int_G |omega_tau|^2
  double wall_ac = 0.0;      // int_G |L(psi)|^2
  double sigma_extra = 0.0;  // (sigma/h^2) int |phi - phi_k|^2
  double eps_extra = 0.0;    // q-growth regulariser forms
  double increment_extra = 0.0;  // unscaled increment terms (see ledger)
};

// Evaluation switches that must match how the step was produced.
struct LedgerFlags {
  bool sigma_on = false;
  bool eps_on = false;
  bool boundary_frozen = false;  // psi held fixed, no wall dynamics terms
};

struct StepLedger {
  DissipationBreakdown dissipation;
  double slack = 0.0;       // >= -tol certifies the step
  double work_input = 0.0;  // body-force power (f, u_new)
  double energy_old = 0.0;
  double energy_new = 0.0;
};

// Total energy with midpoint quadrature consistent with the scheme's
// stencils. Throws DomainError when the logarithmic potential is probed at
// |phi| >= 1 and InfeasibleState for non-finite fields or obstacle states
// outside |phi| <= 1 + 1e-9.
EnergyBreakdown total_energy(const Grid& g, const MixtureState& s,
                             const PhysParams& p);

// Per-step ledger: all dissipation integrals evaluated with the lagged
// coefficients (state_k) and the new fields (state_new), exactly as the
// stepper assembled them. slack =
//   E_old + h*work - E_new - increment_extra - h*(sum of rate terms).
StepLedger step_ledger(const Grid& g, const MixtureState& state_k,
                       const MixtureState& state_new, const PhysParams& p,
                       double h, const LedgerFlags& flags = {});

// Conservation / bound monitors.
struct BoundsReport {
  double mass = 0.0;        // int phi
  double mass_drift = 0.0;  // int phi - int phi0
  double phi_min = 0.0, phi_max = 0.0;
  double psi_min = 0.0, psi_max = 0.0;
  double div_u_inf = 0.0;          // max |div u|
  double wall_normal_inf = 0.0;    // max |u . nu| on the walls
};
BoundsReport conservation_and_bounds(const Grid& g, const MixtureState& s,
                                     const MixtureState& s0,
                                     const PhysParams& p);

}  // namespace mpnsch

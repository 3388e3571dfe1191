#pragma once

// Internal: assembly of the linear part of the time-discrete Cahn-Hilliard /
// dynamic-boundary subsystem, shared by the smooth Newton branch
// (ch_substep) and the active-set branch (pdas_ch_substep).
//
// Unknown layout, N = 2 nc + 2 nx:
//   [0, nc)          phi (cells)
//   [nc, 2nc)        mu  (cells)
//   [2nc, 2nc+nx)    psi at the bottom wall
//   [2nc+nx, N)      psi at the top wall
// Row r is the equation paired with unknown r:
//   phi rows:  (phi - phi_k)/h + div(u avg(phi_k)) - div(m_k grad mu) = 0
//   mu rows:   mu + lap_ghost(phi; psi) - F1'(phi_k)
//              - (sigma_eff/h)(phi - phi_k)  [- convex bulk force, NOT here]
//   psi rows:  (psi - psi_k)/h + transp + 2(psi - phi_adj)/dy + zeta psi
//              + G0'(psi) + G1'(psi_k) - lap_G psi = 0
// All rows are volume-integrated (dV for cells, dx for wall nodes); the
// integration weight is recorded in row_scale so residual norms can be read
// pointwise. The convex bulk force (theta F0' or the obstacle multiplier) is
// branch-specific and deliberately absent.

#include <vector>

#include "mpnsch/grid.hpp"
#include "mpnsch/linsolve.hpp"
#include "mpnsch/state.hpp"

namespace mpnsch::detail {

struct ChLayout {
  int nc = 0, nx = 0;
  int n() const { return 2 * nc + 2 * nx; }
  int phi(int c) const { return c; }
  int mu(int c) const { return nc + c; }
  int psib(int i) const { return 2 * nc + i; }
  int psit(int i) const { return 2 * nc + nx + i; }
};

struct ChLinear {
  ChLayout lay;
  std::vector<Triplet> tri;
  std::vector<double> rhs;
  std::vector<double> row_scale;
};

ChLinear build_ch_linear(const Grid& g, const MixtureState& sk,
                         const FacePair& u_iter, const PhysParams& p,
                         double sigma_eff, bool freeze_boundary);

// Tangential wall transport u_tau . grad_G psi_k, one value per wall node,
// with the staggered-gradient quadrature matched to the Young stress term:
//   transp_i = 1/2 [ u1(i, jw) g_i + u1(i+1, jw) g_{i+1} ],
//   g_i = (psi_i - psi_{i-1}) / dx.
std::vector<double> wall_transport(const Grid& g, const BoundaryField& psik,
                                   const FacePair& u_iter);

// Boundary chemical potential recovered from the wall evolution identity
// L = -[(psi - psi_k)/h + transp]; exact for the discrete solution and the
// definition the energy ledger's wall quadratures rely on.
BoundaryField wall_L_from_evolution(const Grid& g, const BoundaryField& psi,
                                    const BoundaryField& psik,
                                    const std::vector<double>& transp,
                                    double h);

}  // namespace mpnsch::detail

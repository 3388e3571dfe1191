#pragma once

// Internal helpers shared by the stepper assembly, the obstacle solver and
// the energy ledger. Both sides of the per-step energy identity must use
// literally the same stencils and the same lagged coefficients; keeping the
// quadratures here is what makes the ledger an algebraic identity instead
// of an approximation.

#include <cmath>

#include "mpnsch/grid.hpp"
#include "mpnsch/state.hpp"

namespace mpnsch::detail {

inline CellField cell_density(const Grid& g, const CellField& phi,
                              const PhysParams& p) {
  CellField r = g.make_cell();
  for (int k = 0; k < g.cells(); ++k) r[k] = density(phi[k], p).rho;
  return r;
}

inline CellField cell_coeff(const Grid& g, const CellField& phi,
                            const EndpointPair& a) {
  CellField c = g.make_cell();
  for (int k = 0; k < g.cells(); ++k) c[k] = interpolate_coeff(phi[k], a);
  return c;
}

// Arithmetic cell-to-face averages; the wall rows of the y-face average are
// zero (no wall-normal transport of cell quantities).
inline XFaceField xface_avg(const Grid& g, const CellField& c) {
  XFaceField f = g.make_xface();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      f[g.xface(i, j)] = 0.5 * (c[g.cell(i - 1, j)] + c[g.cell(i, j)]);
  return f;
}

inline YFaceField yface_avg_interior(const Grid& g, const CellField& c) {
  YFaceField f = g.make_yface();
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      f[g.yface(i, j)] = 0.5 * (c[g.cell(i, j - 1)] + c[g.cell(i, j)]);
  return f;
}

// Interior-node average of a cell coefficient (used by the off-diagonal
// viscous quadrature); wall-node rows stay zero and carry no quadrature.
inline NodeField node_avg_interior(const Grid& g, const CellField& c) {
  NodeField n = g.make_node();
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      n[g.node(i, j)] = 0.25 * (c[g.cell(i - 1, j - 1)] + c[g.cell(i, j - 1)] +
                                c[g.cell(i - 1, j)] + c[g.cell(i, j)]);
  return n;
}

// Bulk gradient energy (1/2)||grad phi||^2 with the ghost-from-trace wall
// closure: interior face differences plus the wall half-face contribution
// ((psi - phi_adj)/(dy/2))^2 * (dx*dy/2) per wall cell.
inline double grad_energy_bulk(const Grid& g, const CellField& phi,
                               const BoundaryField& psi_b,
                               const BoundaryField& psi_t) {
  const double dV = g.cell_volume();
  double e = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double d = (phi[g.cell(i, j)] - phi[g.cell(i - 1, j)]) / g.dx;
      e += d * d * dV;
    }
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double d = (phi[g.cell(i, j)] - phi[g.cell(i, j - 1)]) / g.dy;
      e += d * d * dV;
    }
  for (int i = 0; i < g.nx; ++i) {
    const double db = (psi_b[i] - phi[g.cell(i, 0)]) / (0.5 * g.dy);
    const double dt = (psi_t[i] - phi[g.cell(i, g.ny - 1)]) / (0.5 * g.dy);
    e += (db * db + dt * dt) * (0.5 * dV);
  }
  return 0.5 * e;
}

// Interior-face share of the bulk gradient energy (homogeneous-Neumann
// closure, used when the boundary data are frozen).
inline double grad_energy_bulk_interior(const Grid& g, const CellField& phi) {
  const double dV = g.cell_volume();
  double e = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double d = (phi[g.cell(i, j)] - phi[g.cell(i - 1, j)]) / g.dx;
      e += d * d * dV;
    }
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double d = (phi[g.cell(i, j)] - phi[g.cell(i, j - 1)]) / g.dy;
      e += d * d * dV;
    }
  return 0.5 * e;
}

// Surface gradient energy (1/2) sum of staggered differences squared.
inline double grad_energy_surface(const Grid& g, const BoundaryField& psi) {
  double e = 0.0;
  for (int i = 0; i < g.nx; ++i) {
    const double d = (psi[i] - psi[g.wrap(i - 1)]) / g.dx;
    e += d * d * g.dx;
  }
  return 0.5 * e;
}

// Chemical dissipation int m(phi_k) |grad mu|^2 with face-averaged mobility
// and zero-flux walls (the same stencil the CH system assembles).
inline double chemical_dissipation(const Grid& g, const CellField& m_k,
                                   const CellField& mu) {
  const double dV = g.cell_volume();
  double e = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double mf = 0.5 * (m_k[g.cell(i - 1, j)] + m_k[g.cell(i, j)]);
      const double d = (mu[g.cell(i, j)] - mu[g.cell(i - 1, j)]) / g.dx;
      e += mf * d * d * dV;
    }
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double mf = 0.5 * (m_k[g.cell(i, j - 1)] + m_k[g.cell(i, j)]);
      const double d = (mu[g.cell(i, j)] - mu[g.cell(i, j - 1)]) / g.dy;
      e += mf * d * d * dV;
    }
  return e;
}

// Shear dissipation int 2 eta |Du|^2: diagonal entries at cells, the
// off-diagonal pair (2 * 2 eta d12^2) at interior nodes.
inline double shear_dissipation(const Grid& g, const CellField& eta_c,
                                const FacePair& u) {
  const SymGrad s = sym_grad(g, u);
  const NodeField eta_n = node_avg_interior(g, eta_c);
  const double dV = g.cell_volume();
  double e = 0.0;
  for (int k = 0; k < g.cells(); ++k)
    e += 2.0 * eta_c[k] * (s.d11[k] * s.d11[k] + s.d22[k] * s.d22[k]) * dV;
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int n = g.node(i, j);
      e += 4.0 * eta_n[n] * s.d12[n] * s.d12[n] * dV;
    }
  return e;
}

// Exchange dissipation int 4 eta_r |curl u / 2 - omega|^2, evaluated as
// eta_r (curl u - 2 omega)^2 with the cell-centered curl.
inline double exchange_dissipation(const Grid& g, const CellField& etar_c,
                                   const FacePair& u, const CellField& w) {
  const CellField cu = curl_of_vector(g, u);
  const double dV = g.cell_volume();
  double e = 0.0;
  for (int k = 0; k < g.cells(); ++k) {
    const double d = cu[k] - 2.0 * w[k];
    e += etar_c[k] * d * d * dV;
  }
  return e;
}

// int coeff |grad omega|^2 with face-averaged coefficient and natural
// (zero-flux) walls; used for both the cd and ca shares (for the scalar
// micro-rotation 2|Dw|^2 = 2|Ww|^2 = |grad w|^2).
inline double micro_grad_dissipation(const Grid& g, const CellField& coeff_c,
                                     const CellField& w) {
  return chemical_dissipation(g, coeff_c, w);
}

// Wall quadratures: traces are the wall-adjacent tangential samples.
inline double wall_trace_sq_xface(const Grid& g, const XFaceField& u1) {
  double e = 0.0;
  for (int i = 0; i < g.nx; ++i) {
    const double b = u1[g.xface(i, 0)];
    const double t = u1[g.xface(i, g.ny - 1)];
    e += (b * b + t * t) * g.dx;
  }
  return e;
}

inline double wall_trace_sq_cell(const Grid& g, const CellField& w) {
  double e = 0.0;
  for (int i = 0; i < g.nx; ++i) {
    const double b = w[g.cell(i, 0)];
    const double t = w[g.cell(i, g.ny - 1)];
    e += (b * b + t * t) * g.dx;
  }
  return e;
}

inline double boundary_sq(const Grid& g, const BoundaryField& f) {
  double e = 0.0;
  for (int i = 0; i < g.nx; ++i) e += f[i] * f[i] * g.dx;
  return e;
}

// Lagged coefficients of the componentwise q-growth regulariser
// eps * |grad u|^{q-2} grad u + eps * |u|^{q-2} u, with the gradient
// magnitude split between the cell (diagonal) and node (off-diagonal)
// quadrature points and the zeroth-order magnitude taken per component.
struct QRegVel {
  CellField cell;    // eps * (d11^2 + d22^2)^{(q-2)/2}
  NodeField node;    // eps * ((d2 u1)^2 + (d1 u2)^2)^{(q-2)/2}, interior
  XFaceField zero_x; // eps * |u1|^{q-2}
  YFaceField zero_y; // eps * |u2|^{q-2}, interior rows
};

inline QRegVel qreg_vel_coeffs(const Grid& g, const FacePair& u_lag,
                               double eps, double q) {
  QRegVel c{g.make_cell(), g.make_node(), g.make_xface(), g.make_yface()};
  const double e2 = 0.5 * (q - 2.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double d11 =
          (u_lag.x[g.xface(i + 1, j)] - u_lag.x[g.xface(i, j)]) / g.dx;
      const double d22 =
          (u_lag.y[g.yface(i, j + 1)] - u_lag.y[g.yface(i, j)]) / g.dy;
      c.cell[g.cell(i, j)] = eps * std::pow(d11 * d11 + d22 * d22, e2);
    }
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double d21 =
          (u_lag.x[g.xface(i, j)] - u_lag.x[g.xface(i, j - 1)]) / g.dy;
      const double d12 =
          (u_lag.y[g.yface(i, j)] - u_lag.y[g.yface(i - 1, j)]) / g.dx;
      c.node[g.node(i, j)] = eps * std::pow(d21 * d21 + d12 * d12, e2);
    }
  for (int k = 0; k < g.xfaces(); ++k)
    c.zero_x[k] = eps * std::pow(u_lag.x[k] * u_lag.x[k], e2);
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int k = g.yface(i, j);
      c.zero_y[k] = eps * std::pow(u_lag.y[k] * u_lag.y[k], e2);
    }
  return c;
}

// Quadratic form value of the velocity q-regulariser for given lagged
// coefficients (the assembly adds the matching bilinear form).
inline double qreg_vel_value(const Grid& g, const QRegVel& c,
                             const FacePair& u) {
  const double dV = g.cell_volume();
  double e = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double d11 =
          (u.x[g.xface(i + 1, j)] - u.x[g.xface(i, j)]) / g.dx;
      const double d22 =
          (u.y[g.yface(i, j + 1)] - u.y[g.yface(i, j)]) / g.dy;
      e += c.cell[g.cell(i, j)] * (d11 * d11 + d22 * d22) * dV;
    }
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double d21 =
          (u.x[g.xface(i, j)] - u.x[g.xface(i, j - 1)]) / g.dy;
      const double d12 =
          (u.y[g.yface(i, j)] - u.y[g.yface(i - 1, j)]) / g.dx;
      e += c.node[g.node(i, j)] * (d21 * d21 + d12 * d12) * dV;
    }
  for (int k = 0; k < g.xfaces(); ++k)
    e += c.zero_x[k] * u.x[k] * u.x[k] * dV;
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int k = g.yface(i, j);
      e += c.zero_y[k] * u.y[k] * u.y[k] * dV;
    }
  return e;
}

// Same for the scalar micro-rotation: eps |grad w|^{q-2} at faces plus
// eps |w|^{q-2} at cells, componentwise per face.
struct QRegRot {
  XFaceField face_x;
  YFaceField face_y;  // interior rows
  CellField zero;
};

inline QRegRot qreg_rot_coeffs(const Grid& g, const CellField& w_lag,
                               double eps, double q) {
  QRegRot c{g.make_xface(), g.make_yface(), g.make_cell()};
  const double e2 = 0.5 * (q - 2.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double d =
          (w_lag[g.cell(i, j)] - w_lag[g.cell(i - 1, j)]) / g.dx;
      c.face_x[g.xface(i, j)] = eps * std::pow(d * d, e2);
    }
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double d =
          (w_lag[g.cell(i, j)] - w_lag[g.cell(i, j - 1)]) / g.dy;
      c.face_y[g.yface(i, j)] = eps * std::pow(d * d, e2);
    }
  for (int k = 0; k < g.cells(); ++k)
    c.zero[k] = eps * std::pow(w_lag[k] * w_lag[k], e2);
  return c;
}

inline double qreg_rot_value(const Grid& g, const QRegRot& c,
                             const CellField& w) {
  const double dV = g.cell_volume();
  double e = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double d = (w[g.cell(i, j)] - w[g.cell(i - 1, j)]) / g.dx;
      e += c.face_x[g.xface(i, j)] * d * d * dV;
    }
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double d = (w[g.cell(i, j)] - w[g.cell(i, j - 1)]) / g.dy;
      e += c.face_y[g.yface(i, j)] * d * d * dV;
    }
  for (int k = 0; k < g.cells(); ++k)
    e += c.zero[k] * w[k] * w[k] * dV;
  return e;
}

}  // namespace mpnsch::detail

#include "mpnsch/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mpnsch/errors.hpp"
#include "mpnsch/obstacle.hpp"
#include "ch_system.hpp"
#include "scheme_detail.hpp"

namespace mpnsch {

void StepConfig::validate() const {
  std::vector<std::string> bad;
  if (!(picard_tol > 0.0)) bad.push_back("picard_tol must be positive");
  if (picard_max < 1) bad.push_back("picard_max must be at least 1");
  if (!(newton_tol > 0.0)) bad.push_back("newton_tol must be positive");
  if (newton_max < 1) bad.push_back("newton_max must be at least 1");
  if (!(under_relaxation > 0.0) || under_relaxation > 1.0)
    bad.push_back("under_relaxation must lie in (0, 1]");
  if (!bad.empty()) throw ValidationError(bad);
}

namespace detail {

std::vector<double> wall_transport(const Grid& g, const BoundaryField& psik,
                                   const FacePair& u_iter) {
  require_size(psik.size(), g.nx, "wall_transport: psi");
  const int jw = psik.wall == Wall::Bottom ? 0 : g.ny - 1;
  std::vector<double> grad(g.nx), out(g.nx);
  for (int i = 0; i < g.nx; ++i)
    grad[i] = (psik[i] - psik[g.wrap(i - 1)]) / g.dx;
  for (int i = 0; i < g.nx; ++i)
    out[i] = 0.5 * (u_iter.x[g.xface(i, jw)] * grad[i] +
                    u_iter.x[g.xface(i + 1, jw)] * grad[g.wrap(i + 1)]);
  return out;
}

BoundaryField wall_L_from_evolution(const Grid& g, const BoundaryField& psi,
                                    const BoundaryField& psik,
                                    const std::vector<double>& transp,
                                    double h) {
  BoundaryField L = g.make_boundary(psi.wall);
  for (int i = 0; i < g.nx; ++i)
    L[i] = -((psi[i] - psik[i]) / h + transp[i]);
  return L;
}

ChLinear build_ch_linear(const Grid& g, const MixtureState& sk,
                         const FacePair& u_iter, const PhysParams& p,
                         double sigma_eff, bool freeze_boundary) {
  const int nx = g.nx, ny = g.ny, nc = g.cells();
  const double dx = g.dx, dy = g.dy, dV = g.cell_volume(), h = p.h;
  const double ax = dV / (dx * dx);  // face area over distance, x faces
  const double ay = dV / (dy * dy);

  ChLinear L;
  L.lay = ChLayout{nc, nx};
  const int N = L.lay.n();
  L.tri.reserve(static_cast<std::size_t>(nc) * 14 + nx * 10);
  L.rhs.assign(N, 0.0);
  L.row_scale.assign(N, 1.0);

  const CellField mk = cell_coeff(g, sk.phi, p.mobility);

  // phi rows: time derivative, explicit transport, implicit mu diffusion.
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int c = g.cell(i, j);
      const int row = L.lay.phi(c);
      L.row_scale[row] = dV;
      L.tri.push_back({row, L.lay.phi(c), dV / h});

      double diag_mu = 0.0;
      const int cE = g.cell(i + 1, j), cW = g.cell(i - 1, j);
      const double mE = 0.5 * (mk[c] + mk[cE]);
      const double mW = 0.5 * (mk[c] + mk[cW]);
      L.tri.push_back({row, L.lay.mu(cE), -mE * ax});
      L.tri.push_back({row, L.lay.mu(cW), -mW * ax});
      diag_mu += (mE + mW) * ax;
      if (j + 1 < ny) {
        const int cN = g.cell(i, j + 1);
        const double mN = 0.5 * (mk[c] + mk[cN]);
        L.tri.push_back({row, L.lay.mu(cN), -mN * ay});
        diag_mu += mN * ay;
      }
      if (j > 0) {
        const int cS = g.cell(i, j - 1);
        const double mS = 0.5 * (mk[c] + mk[cS]);
        L.tri.push_back({row, L.lay.mu(cS), -mS * ay});
        diag_mu += mS * ay;
      }
      L.tri.push_back({row, L.lay.mu(c), diag_mu});

      // Explicit centered transport of avg(phi_k) by u_iter.
      const double pE = 0.5 * (sk.phi[c] + sk.phi[cE]);
      const double pW = 0.5 * (sk.phi[c] + sk.phi[cW]);
      double conv = (u_iter.x[g.xface(i + 1, j)] * pE -
                     u_iter.x[g.xface(i, j)] * pW) *
                    dy;
      if (j + 1 < ny) {
        const double pN = 0.5 * (sk.phi[c] + sk.phi[g.cell(i, j + 1)]);
        conv += u_iter.y[g.yface(i, j + 1)] * pN * dx;
      }
      if (j > 0) {
        const double pS = 0.5 * (sk.phi[c] + sk.phi[g.cell(i, j - 1)]);
        conv -= u_iter.y[g.yface(i, j)] * pS * dx;
      }
      L.rhs[row] = dV / h * sk.phi[c] - conv;
    }

  // mu rows: mu + lap_ghost(phi; psi) - F1'(phi_k) - (sigma/h)(phi - phi_k).
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int c = g.cell(i, j);
      const int row = L.lay.mu(c);
      L.row_scale[row] = dV;
      L.tri.push_back({row, L.lay.mu(c), dV});

      double diag_phi = -sigma_eff / h * dV;
      L.tri.push_back({row, L.lay.phi(g.cell(i + 1, j)), ax});
      L.tri.push_back({row, L.lay.phi(g.cell(i - 1, j)), ax});
      diag_phi -= 2.0 * ax;
      if (j + 1 < ny) {
        L.tri.push_back({row, L.lay.phi(g.cell(i, j + 1)), ay});
        diag_phi -= ay;
      } else if (!freeze_boundary) {
        // ghost 2 psi - phi across the top wall
        L.tri.push_back({row, L.lay.psit(i), 2.0 * ay});
        diag_phi -= 2.0 * ay;
      }
      if (j > 0) {
        L.tri.push_back({row, L.lay.phi(g.cell(i, j - 1)), ay});
        diag_phi -= ay;
      } else if (!freeze_boundary) {
        L.tri.push_back({row, L.lay.psib(i), 2.0 * ay});
        diag_phi -= 2.0 * ay;
      }
      L.tri.push_back({row, L.lay.phi(c), diag_phi});

      L.rhs[row] = (p.pot.dF1(sk.phi[c]) - sigma_eff / h * sk.phi[c]) * dV;
    }

  // psi rows, bottom then top.
  const double g0_const = p.bpot.dG0(0.0);
  const double g0_slope = p.bpot.dG0(1.0) - g0_const;  // linear for both kinds
  for (int wall = 0; wall < 2; ++wall) {
    const bool bottom = wall == 0;
    const BoundaryField& psik = bottom ? sk.psi_bottom : sk.psi_top;
    const int jadj = bottom ? 0 : ny - 1;
    const std::vector<double> transp = wall_transport(g, psik, u_iter);
    for (int i = 0; i < nx; ++i) {
      const int row = bottom ? L.lay.psib(i) : L.lay.psit(i);
      L.row_scale[row] = dx;
      if (freeze_boundary) {
        L.tri.push_back({row, row, dx});
        L.rhs[row] = dx * psik[i];
        continue;
      }
      const int colm = bottom ? L.lay.psib(g.wrap(i - 1))
                              : L.lay.psit(g.wrap(i - 1));
      const int colp = bottom ? L.lay.psib(g.wrap(i + 1))
                              : L.lay.psit(g.wrap(i + 1));
      const double diag =
          (1.0 / h + 2.0 / dy + p.zeta() + g0_slope) * dx + 2.0 / dx;
      L.tri.push_back({row, row, diag});
      L.tri.push_back({row, colm, -1.0 / dx});
      L.tri.push_back({row, colp, -1.0 / dx});
      L.tri.push_back({row, L.lay.phi(g.cell(i, jadj)), -2.0 * dx / dy});
      L.rhs[row] =
          (psik[i] / h - transp[i] - p.bpot.dG1(psik[i]) - g0_const) * dx;
    }
  }
  return L;
}

}  // namespace detail

namespace {

using detail::ChLayout;
using detail::ChLinear;

}  // namespace

ChResult ch_substep(const Grid& g, const MixtureState& state_k,
                    const FacePair& u_iter, const PhysParams& p,
                    const StepConfig& cfg) {
  if (p.pot.kind == PotentialKind::Obstacle)
    throw UnsupportedPotential(
        "ch_substep handles smooth potentials; the obstacle potential "
        "requires the active-set branch");
  const int nc = g.cells(), nx = g.nx;
  const double dV = g.cell_volume();
  const double sigma_eff = cfg.enable_sigma_regulariser ? p.sigma : 0.0;
  const bool log_kind = p.pot.kind == PotentialKind::Logarithmic;

  const ChLinear lin = detail::build_ch_linear(g, state_k, u_iter, p,
                                               sigma_eff,
                                               cfg.freeze_boundary_data);
  const int N = lin.lay.n();
  const SparseMatrix M = SparseMatrix::from_triplets(N, N, lin.tri);

  // Initial iterate: phi_k, psi_k and the pointwise chemical potential of
  // the old state (an exact solution at equilibrium, so Newton can accept
  // the initial iterate without any work).
  auto init_iterate = [&](const SplitPotential& spot) {
    std::vector<double> X0(N, 0.0);
    const WallBC bc = cfg.freeze_boundary_data ? WallBC::HomogeneousNeumann
                                               : WallBC::GhostFromTrace;
    const CellField lap = laplacian_cell(g, state_k.phi, bc,
                                         &state_k.psi_bottom,
                                         &state_k.psi_top);
    for (int c = 0; c < nc; ++c) {
      X0[lin.lay.phi(c)] = state_k.phi[c];
      X0[lin.lay.mu(c)] = -lap[c] + spot.convex(state_k.phi[c]).dF +
                          spot.dF1(state_k.phi[c]);
    }
    for (int i = 0; i < nx; ++i) {
      X0[lin.lay.psib(i)] = state_k.psi_bottom[i];
      X0[lin.lay.psit(i)] = state_k.psi_top[i];
    }
    return X0;
  };

  std::vector<double> history;
  double max_lin = 0.0;
  int total_iters = 0;
  double final_rnorm = 0.0;
  // Shared absolute tolerance: anchored at the residual of the very first
  // iterate so warm-started continuation stages face the same target as a
  // single direct solve would.
  double tol = -1.0;

  // Closest admissible approach to +-1 for the logarithmic kind. Cells the
  // flow presses harder than the barrier can answer within doubles are held
  // at this bound and their force excess is read as a complementarity
  // multiplier, which is exactly the obstacle limit the barrier degenerates
  // to once its curvature exceeds 1/eps.
  constexpr double kLogPin = 1e-9;
  const double bnd = 1.0 - kLogPin;

  // One damped-Newton solve of the substep system with the given potential.
  // `guarded` (bare logarithmic potential) confines iterates to
  // |phi| <= bnd: each candidate is clipped so a cell closes at most 90% of
  // its remaining distance to the bound per iteration.
  auto run_newton = [&](const SplitPotential& spot, bool guarded,
                        std::vector<double>& X) {
    auto eval_residual = [&](const std::vector<double>& Y) {
      std::vector<double> R = M.apply(Y);
      for (int i = 0; i < N; ++i) R[i] -= lin.rhs[i];
      for (int c = 0; c < nc; ++c)
        R[lin.lay.mu(c)] -= spot.convex(Y[lin.lay.phi(c)]).dF * dV;
      return R;
    };
    // Scaled max-norm with two per-row allowances on mu-rows:
    //  - the floating-point floor of the convex force (a row cannot be
    //    satisfied more accurately than the change of dF across one
    //    representable phi value, about ddF(phi) * eps * |phi|), and
    //  - in guarded mode, one-sided forgiveness at the pinning bound: a
    //    cell pressed against +-bnd whose row still demands more outward
    //    force carries a multiplier, not an error (the sign convention of
    //    the assembled row puts that multiplier at positive residual on the
    //    upper bound and negative on the lower one).
    // Folding the allowances into the norm rather than checking them
    // separately matters: otherwise pinned rows dominate the plain max-norm
    // and the line search deadlocks while free rows still have room to
    // improve.
    auto merit = [&](const std::vector<double>& Y,
                     const std::vector<double>& Rv) {
      constexpr double kEps = std::numeric_limits<double>::epsilon();
      double m = 0.0;
      for (int c = 0; c < nc; ++c) {
        const int pr = lin.lay.phi(c), mr = lin.lay.mu(c);
        const double v = Y[pr];
        const double q = spot.convex(v).ddF * kEps * std::abs(v);
        double s_mu = std::abs(Rv[mr]) / lin.row_scale[mr] - q;
        if (guarded) {
          if (v >= bnd - 1e-12 && Rv[mr] >= 0.0) s_mu = 0.0;
          if (v <= -(bnd - 1e-12) && Rv[mr] <= 0.0) s_mu = 0.0;
        }
        m = std::max(m, std::abs(Rv[pr]) / lin.row_scale[pr]);
        m = std::max(m, s_mu);
      }
      for (int i = 0; i < nx; ++i) {
        const int br = lin.lay.psib(i), tr = lin.lay.psit(i);
        m = std::max(m, std::abs(Rv[br]) / lin.row_scale[br]);
        m = std::max(m, std::abs(Rv[tr]) / lin.row_scale[tr]);
      }
      return m;
    };

    std::vector<double> R = eval_residual(X);
    double rnorm = merit(X, R);
    if (tol < 0.0) tol = cfg.newton_tol * (1.0 + rnorm);
    history.push_back(rnorm);

    int iters = 0;
    std::vector<signed char> pin(nc, 0);
    while (rnorm > tol) {
      if (iters >= cfg.newton_max)
        throw NewtonDiverged("phase-field Newton iteration did not converge",
                             history);
      // In guarded mode, cells held at the bound whose rows still press
      // outward get their force-balance rows replaced by phi = +-bnd in
      // the solve. Merely clipping their updates is not enough: the solver
      // would keep proposing the unattainable outward move and smear the
      // unmet demand over the neighbouring transport rows, which stalls
      // the iteration a little above the tolerance.
      if (guarded) {
        for (int c = 0; c < nc; ++c) {
          const double v = X[lin.lay.phi(c)];
          const double r = R[lin.lay.mu(c)];
          pin[c] = (v >= bnd - 1e-12 && r >= 0.0)      ? +1
                   : (v <= -(bnd - 1e-12) && r <= 0.0) ? -1
                                                       : 0;
        }
      }
      std::vector<Triplet> jt;
      jt.reserve(lin.tri.size() + nc);
      for (const Triplet& trp : lin.tri) {
        const int c = trp.r - nc;  // mu-rows occupy [nc, 2*nc)
        if (c >= 0 && c < nc && pin[c] != 0) continue;
        jt.push_back(trp);
      }
      for (int c = 0; c < nc; ++c) {
        if (pin[c] != 0)
          jt.push_back({lin.lay.mu(c), lin.lay.phi(c), dV});
        else
          jt.push_back({lin.lay.mu(c), lin.lay.phi(c),
                        -spot.convex(X[lin.lay.phi(c)]).ddF * dV});
      }
      const SparseMatrix J = SparseMatrix::from_triplets(N, N, jt);
      std::vector<double> negR(N);
      double bn = 0.0;
      for (int i = 0; i < N; ++i) {
        negR[i] = -R[i];
        bn += R[i] * R[i];
      }
      for (int c = 0; c < nc; ++c)
        if (pin[c] != 0)
          negR[lin.lay.mu(c)] = -(X[lin.lay.phi(c)] - pin[c] * bnd) * dV;
      auto [dX, stats] = solve(J, negR, cfg.lin);
      max_lin = std::max(max_lin, stats.residual / (1.0 + std::sqrt(bn)));

      double t = 1.0;
      bool accepted = false;
      std::vector<double> cand(N);
      for (int ls = 0; ls < 40; ++ls) {
        for (int i = 0; i < N; ++i) cand[i] = X[i] + t * dX[i];
        if (guarded) {
          for (int c = 0; c < nc; ++c) {
            if (pin[c] != 0) continue;  // lands exactly on the bound
            const int pc = lin.lay.phi(c);
            const double v = X[pc];
            const double lo = v - 0.9 * (v + bnd), hi = v + 0.9 * (bnd - v);
            cand[pc] = std::clamp(cand[pc], lo, hi);
          }
        }
        std::vector<double> Rc = eval_residual(cand);
        const double rc = merit(cand, Rc);
        if (rc <= (1.0 - 1e-4 * t) * rnorm) {
          X.swap(cand);
          R.swap(Rc);
          rnorm = rc;
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted)
        throw NewtonDiverged(
            "phase-field Newton line search failed to reduce the residual",
            history);
      history.push_back(rnorm);
      ++iters;
    }
    total_iters += iters;
    final_rnorm = rnorm;
  };

  std::vector<double> X;
  if (!log_kind) {
    X = init_iterate(p.pot);
    run_newton(p.pot, false, X);
  } else {
    // Two-phase solve for the logarithmic kind. Phase one replaces the
    // barrier by its C^2 quadratic extension beyond |phi| = 1 - kappa0 and
    // solves the smooth system without domain safeguards; its bounded
    // curvature lets the damped iteration absorb the large residuals of
    // under-resolved interfaces in a handful of steps, where the bare
    // barrier traps the iteration (proposed updates far outside (-1,1),
    // safeguards parking cells next to +-1, no representable iterate able
    // to balance the demanded force). The extension agrees with the
    // barrier on |phi| <= 1 - kappa0, so when the phase-one solution stays
    // in that range it already solves the logarithmic system exactly.
    // Otherwise phase two projects into |phi| <= bnd and polishes with the
    // guarded barrier iteration, whose merit reads force demands beyond
    // the pinning bound as one-sided multipliers.
    constexpr double kKappa0 = 1e-2;
    const SplitPotential stage = SplitPotential::kappa_regularised(
        p.pot.theta, p.pot.theta_c, kKappa0);
    X = init_iterate(stage);
    run_newton(stage, false, X);
    double min_gap = 2.0;
    for (int c = 0; c < nc; ++c)
      min_gap = std::min(min_gap, 1.0 - std::abs(X[lin.lay.phi(c)]));
    if (min_gap < kKappa0) {
      for (int c = 0; c < nc; ++c) {
        const int pc = lin.lay.phi(c);
        X[pc] = std::clamp(X[pc], -bnd, bnd);
      }
      run_newton(p.pot, true, X);
    }
  }

  ChResult out;
  out.phi = g.make_cell();
  out.mu = g.make_cell();
  out.xi = g.make_cell();
  out.psi_bottom = g.make_boundary(Wall::Bottom);
  out.psi_top = g.make_boundary(Wall::Top);
  out.xi_bottom = g.make_boundary(Wall::Bottom);
  out.xi_top = g.make_boundary(Wall::Top);
  for (int c = 0; c < nc; ++c) {
    out.phi[c] = X[lin.lay.phi(c)];
    out.mu[c] = X[lin.lay.mu(c)];
  }
  for (int i = 0; i < nx; ++i) {
    out.psi_bottom[i] = X[lin.lay.psib(i)];
    out.psi_top[i] = X[lin.lay.psit(i)];
  }
  if (cfg.freeze_boundary_data) {
    out.Lpsi_bottom = g.make_boundary(Wall::Bottom);
    out.Lpsi_top = g.make_boundary(Wall::Top);
  } else {
    out.Lpsi_bottom = detail::wall_L_from_evolution(
        g, out.psi_bottom, state_k.psi_bottom,
        detail::wall_transport(g, state_k.psi_bottom, u_iter), p.h);
    out.Lpsi_top = detail::wall_L_from_evolution(
        g, out.psi_top, state_k.psi_top,
        detail::wall_transport(g, state_k.psi_top, u_iter), p.h);
  }
  out.newton_iters = total_iters;
  out.residual = final_rnorm;
  out.lin_residual = max_lin;
  return out;
}

FluxFields flux_fields(const Grid& g, const CellField& phi_k,
                       const CellField& mu_new, const PhysParams& p) {
  require_size(phi_k.size(), g.cells(), "flux_fields: phi_k");
  require_size(mu_new.size(), g.cells(), "flux_fields: mu_new");
  FluxFields f{g.make_faces(), g.make_cell()};
  CellField gm = g.make_cell();  // rho'(phi_k) m(phi_k)
  for (int c = 0; c < g.cells(); ++c)
    gm[c] = density(phi_k[c], p).drho * interpolate_coeff(phi_k[c], p.mobility);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int cL = g.cell(i - 1, j), cR = g.cell(i, j);
      f.J.x[g.xface(i, j)] =
          -0.5 * (gm[cL] + gm[cR]) * (mu_new[cR] - mu_new[cL]) / g.dx;
    }
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int cS = g.cell(i, j - 1), cN = g.cell(i, j);
      f.J.y[g.yface(i, j)] =
          -0.5 * (gm[cS] + gm[cN]) * (mu_new[cN] - mu_new[cS]) / g.dy;
    }
  return f;
}

CellField flux_residual(const Grid& g, const CellField& phi_k,
                        const CellField& phi_new, const FacePair& u,
                        const FacePair& J, const PhysParams& p, double h) {
  require_size(phi_new.size(), g.cells(), "flux_residual: phi_new");
  const CellField rho_k = detail::cell_density(g, phi_k, p);
  const XFaceField rkx = detail::xface_avg(g, rho_k);
  const YFaceField rky = detail::yface_avg_interior(g, rho_k);
  FacePair F = g.make_faces();
  for (int k = 0; k < g.xfaces(); ++k) F.x[k] = rkx[k] * u.x[k] + J.x[k];
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int k = g.yface(i, j);
      F.y[k] = rky[k] * u.y[k] + J.y[k];
    }
  CellField R = divergence(g, F);
  for (int c = 0; c < g.cells(); ++c)
    R[c] += (density(phi_new[c], p).rho - rho_k[c]) / h;
  return R;
}

MomentumResult momentum_substep(const Grid& g, const MixtureState& state_k,
                                const ChResult& ch, const FacePair& u_iter,
                                const CellField& omega_iter,
                                const PhysParams& p, const StepConfig& cfg) {
  const int nx = g.nx, ny = g.ny, nc = g.cells();
  const double dx = g.dx, dy = g.dy, dV = g.cell_volume(), h = p.h;

  const int n_u1 = g.xfaces();
  const int n_u2 = nx * (ny - 1);  // interior y faces only
  const int base_w = n_u1 + n_u2;
  const int n = base_w + nc;
  auto idx_u1 = [&](int i, int j) { return g.xface(i, j); };
  auto idx_u2 = [&](int i, int j) { return n_u1 + (j - 1) * nx + g.wrap(i); };
  auto idx_w = [&](int c) { return base_w + c; };

  // Lagged cell coefficients and face densities.
  const CellField rho_kc = detail::cell_density(g, state_k.phi, p);
  const CellField rho_nc = detail::cell_density(g, ch.phi, p);
  const XFaceField rho_kx = detail::xface_avg(g, rho_kc);
  const YFaceField rho_ky = detail::yface_avg_interior(g, rho_kc);
  const XFaceField rho_nx = detail::xface_avg(g, rho_nc);
  const YFaceField rho_ny = detail::yface_avg_interior(g, rho_nc);
  const CellField eta_c = detail::cell_coeff(g, state_k.phi, p.eta);
  const NodeField eta_n = detail::node_avg_interior(g, eta_c);
  const CellField etar_c = detail::cell_coeff(g, state_k.phi, p.eta_r);
  CellField mdiff_c = g.make_cell();  // c_d + c_a
  for (int c = 0; c < nc; ++c)
    mdiff_c[c] = interpolate_coeff(state_k.phi[c], p.cd) +
                 interpolate_coeff(state_k.phi[c], p.ca);

  // Mass flux F = rho_k u_iter on faces and the diffusive flux J.
  const FacePair J = flux_fields(g, state_k.phi, ch.mu, p).J;
  FacePair F = g.make_faces();
  for (int k = 0; k < g.xfaces(); ++k) F.x[k] = rho_kx[k] * u_iter.x[k];
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int k = g.yface(i, j);
      F.y[k] = rho_ky[k] * u_iter.y[k];
    }
  const CellField divc_u = divergence(g, u_iter);
  const CellField divc_F = divergence(g, F);
  const CellField divc_J = divergence(g, J);

  std::vector<Triplet> tri;
  tri.reserve(static_cast<std::size_t>(n) * 20);
  std::vector<double> f(n, 0.0);

  // Shared centered-convection stencil: given the four outward control
  // volume fluxes and the neighbour columns (-1 when the neighbour is a
  // wall-pinned zero), emit div(F avg(q)) tested against the row.
  auto add_convection = [&](int row, double fe, double fw, double fn,
                            double fs, int ce, int cw, int cn, int cs) {
    tri.push_back({row, row, 0.5 * (fe - fw + fn - fs)});
    if (ce >= 0) tri.push_back({row, ce, 0.5 * fe});
    if (cw >= 0) tri.push_back({row, cw, -0.5 * fw});
    if (cn >= 0) tri.push_back({row, cn, 0.5 * fn});
    if (cs >= 0) tri.push_back({row, cs, -0.5 * fs});
  };

  const bool qreg = cfg.enable_q_regulariser && p.eps_reg > 0.0;
  detail::QRegVel qv;
  detail::QRegRot qw;
  if (qreg) {
    qv = detail::qreg_vel_coeffs(g, u_iter, p.eps_reg, p.q);
    if (cfg.solve_omega)
      qw = detail::qreg_rot_coeffs(g, omega_iter, p.eps_reg, p.q);
  }

  // ---- u1 rows ----
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int row = idx_u1(i, j);
      const int cL = g.cell(i - 1, j), cR = g.cell(i, j);

      const double rho_f = rho_nx[row];
      const double rhok_f = rho_kx[row];
      tri.push_back({row, row, rho_f / h * dV});
      f[row] += rhok_f / h * state_k.u.x[row] * dV;

      // Control-volume divergences (average of the two cell divergences).
      const double dcvJ = 0.5 * (divc_J[cL] + divc_J[cR]);
      const double dcvF = 0.5 * (divc_F[cL] + divc_F[cR]);
      const double dcvU = 0.5 * (divc_u[cL] + divc_u[cR]);
      const double ugradrho = dcvF - rhok_f * dcvU;
      tri.push_back(
          {row, row,
           0.5 * (dcvJ - (rho_f - rhok_f) / h - ugradrho) * dV});

      // Mass-flux convection.
      const double fe = 0.5 * (F.x[g.xface(i, j)] + F.x[g.xface(i + 1, j)]) * dy;
      const double fw = 0.5 * (F.x[g.xface(i - 1, j)] + F.x[g.xface(i, j)]) * dy;
      const double fn =
          0.5 * (F.y[g.yface(i - 1, j + 1)] + F.y[g.yface(i, j + 1)]) * dx;
      const double fs = 0.5 * (F.y[g.yface(i - 1, j)] + F.y[g.yface(i, j)]) * dx;
      add_convection(row, fe, fw, fn, fs, idx_u1(i + 1, j), idx_u1(i - 1, j),
                     j + 1 < ny ? idx_u1(i, j + 1) : -1,
                     j > 0 ? idx_u1(i, j - 1) : -1);

      // Diffusive-flux transport (J . grad) u = div(J avg(u)) - (div J) u.
      const double je = 0.5 * (J.x[g.xface(i, j)] + J.x[g.xface(i + 1, j)]) * dy;
      const double jw = 0.5 * (J.x[g.xface(i - 1, j)] + J.x[g.xface(i, j)]) * dy;
      const double jn =
          0.5 * (J.y[g.yface(i - 1, j + 1)] + J.y[g.yface(i, j + 1)]) * dx;
      const double js = 0.5 * (J.y[g.yface(i - 1, j)] + J.y[g.yface(i, j)]) * dx;
      add_convection(row, je, jw, jn, js, idx_u1(i + 1, j), idx_u1(i - 1, j),
                     j + 1 < ny ? idx_u1(i, j + 1) : -1,
                     j > 0 ? idx_u1(i, j - 1) : -1);
      tri.push_back({row, row, -dcvJ * dV});

      // 2 eta d11 share of the viscous stress.
      const double kL = 2.0 * eta_c[cL] * dV / (dx * dx);
      const double kR = 2.0 * eta_c[cR] * dV / (dx * dx);
      tri.push_back({row, row, kL + kR});
      tri.push_back({row, idx_u1(i - 1, j), -kL});
      tri.push_back({row, idx_u1(i + 1, j), -kR});

      if (j == 0 || j == ny - 1) tri.push_back({row, row, dx});  // wall slip

      if (qreg) tri.push_back({row, row, qv.zero_x[row] * dV});

      // Capillary force mu grad(phi_k) and the body force.
      const double mubar = 0.5 * (ch.mu[cL] + ch.mu[cR]);
      f[row] += mubar * (state_k.phi[cR] - state_k.phi[cL]) / dx * dV;
      f[row] += p.body_force_x * dV;

      // Uncompensated Young stress along the walls.
      if (!cfg.freeze_boundary_data && (j == 0 || j == ny - 1)) {
        const BoundaryField& psik =
            j == 0 ? state_k.psi_bottom : state_k.psi_top;
        const BoundaryField& Lw = j == 0 ? ch.Lpsi_bottom : ch.Lpsi_top;
        const double Lbar = 0.5 * (Lw[g.wrap(i - 1)] + Lw[i]);
        f[row] += Lbar * (psik[i] - psik[g.wrap(i - 1)]);
      }
    }

  // ---- u2 rows (interior) ----
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int row = idx_u2(i, j);
      const int cS = g.cell(i, j - 1), cN = g.cell(i, j);
      const int yf = g.yface(i, j);

      const double rho_f = rho_ny[yf];
      const double rhok_f = rho_ky[yf];
      tri.push_back({row, row, rho_f / h * dV});
      f[row] += rhok_f / h * state_k.u.y[yf] * dV;

      const double dcvJ = 0.5 * (divc_J[cS] + divc_J[cN]);
      const double dcvF = 0.5 * (divc_F[cS] + divc_F[cN]);
      const double dcvU = 0.5 * (divc_u[cS] + divc_u[cN]);
      const double ugradrho = dcvF - rhok_f * dcvU;
      tri.push_back(
          {row, row,
           0.5 * (dcvJ - (rho_f - rhok_f) / h - ugradrho) * dV});

      const double fe =
          0.5 * (F.x[g.xface(i + 1, j - 1)] + F.x[g.xface(i + 1, j)]) * dy;
      const double fw = 0.5 * (F.x[g.xface(i, j - 1)] + F.x[g.xface(i, j)]) * dy;
      const double fn = 0.5 * (F.y[g.yface(i, j)] + F.y[g.yface(i, j + 1)]) * dx;
      const double fs = 0.5 * (F.y[g.yface(i, j - 1)] + F.y[g.yface(i, j)]) * dx;
      add_convection(row, fe, fw, fn, fs, idx_u2(i + 1, j), idx_u2(i - 1, j),
                     j + 1 < ny ? idx_u2(i, j + 1) : -1,
                     j - 1 > 0 ? idx_u2(i, j - 1) : -1);

      const double je =
          0.5 * (J.x[g.xface(i + 1, j - 1)] + J.x[g.xface(i + 1, j)]) * dy;
      const double jw = 0.5 * (J.x[g.xface(i, j - 1)] + J.x[g.xface(i, j)]) * dy;
      const double jn = 0.5 * (J.y[g.yface(i, j)] + J.y[g.yface(i, j + 1)]) * dx;
      const double js = 0.5 * (J.y[g.yface(i, j - 1)] + J.y[g.yface(i, j)]) * dx;
      add_convection(row, je, jw, jn, js, idx_u2(i + 1, j), idx_u2(i - 1, j),
                     j + 1 < ny ? idx_u2(i, j + 1) : -1,
                     j - 1 > 0 ? idx_u2(i, j - 1) : -1);
      tri.push_back({row, row, -dcvJ * dV});

      // 2 eta d22 share.
      const double kS = 2.0 * eta_c[cS] * dV / (dy * dy);
      const double kN = 2.0 * eta_c[cN] * dV / (dy * dy);
      tri.push_back({row, row, kS + kN});
      if (j - 1 > 0) tri.push_back({row, idx_u2(i, j - 1), -kS});
      if (j + 1 < ny) tri.push_back({row, idx_u2(i, j + 1), -kN});

      if (qreg) tri.push_back({row, row, qv.zero_y[yf] * dV});

      const double mubar = 0.5 * (ch.mu[cS] + ch.mu[cN]);
      f[row] += mubar * (state_k.phi[cN] - state_k.phi[cS]) / dy * dV;
    }

  // ---- interior-node viscous coupling (4 eta d12^2 quadrature) ----
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int dof[4] = {idx_u1(i, j), idx_u1(i, j - 1), idx_u2(i, j),
                          idx_u2(i - 1, j)};
      const double l[4] = {0.5 / dy, -0.5 / dy, 0.5 / dx, -0.5 / dx};
      const double k = 4.0 * eta_n[g.node(i, j)] * dV;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          tri.push_back({dof[a], dof[b], k * l[a] * l[b]});
      if (qreg) {
        const double kq = qv.node[g.node(i, j)] * dV;
        const double ky = kq / (dy * dy), kx = kq / (dx * dx);
        tri.push_back({dof[0], dof[0], ky});
        tri.push_back({dof[0], dof[1], -ky});
        tri.push_back({dof[1], dof[0], -ky});
        tri.push_back({dof[1], dof[1], ky});
        tri.push_back({dof[2], dof[2], kx});
        tri.push_back({dof[2], dof[3], -kx});
        tri.push_back({dof[3], dof[2], -kx});
        tri.push_back({dof[3], dof[3], kx});
      }
    }
  if (qreg)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        // Cell share of the gradient regulariser (d11 and d22 samples).
        const double kc = qv.cell[g.cell(i, j)] * dV;
        const int e = idx_u1(i + 1, j), w = idx_u1(i, j);
        const double kxx = kc / (dx * dx);
        tri.push_back({e, e, kxx});
        tri.push_back({e, w, -kxx});
        tri.push_back({w, e, -kxx});
        tri.push_back({w, w, kxx});
        const double kyy = kc / (dy * dy);
        const int nn = j + 1 < ny ? idx_u2(i, j + 1) : -1;
        const int ss = j > 0 ? idx_u2(i, j) : -1;
        if (nn >= 0) tri.push_back({nn, nn, kyy});
        if (ss >= 0) tri.push_back({ss, ss, kyy});
        if (nn >= 0 && ss >= 0) {
          tri.push_back({nn, ss, -kyy});
          tri.push_back({ss, nn, -kyy});
        }
      }

  // ---- micro-rotation rows and the exchange coupling ----
  if (cfg.solve_omega) {
    // Cell-centered curl as a sparse map from velocity unknowns, matching
    // curl_of_vector exactly.
    std::vector<Triplet> ktri;
    ktri.reserve(static_cast<std::size_t>(nc) * 16);
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const int c = g.cell(i, j);
        // corner nodes with interior rows only, averaged with equal weight
        const int j0 = std::max(j, 1), j1 = std::min(j + 1, ny - 1);
        const double wgt = j0 == j1 ? 0.5 : 0.25;
        for (int jn = j0; jn <= j1; ++jn)
          for (int di = 0; di <= 1; ++di) {
            const int in = i + di;
            ktri.push_back({c, idx_u2(in, jn), wgt / dx});
            ktri.push_back({c, idx_u2(in - 1, jn), -wgt / dx});
            ktri.push_back({c, idx_u1(in, jn), -wgt / dy});
            ktri.push_back({c, idx_u1(in, jn - 1), wgt / dy});
          }
      }
    const SparseMatrix K = SparseMatrix::from_triplets(nc, base_w, ktri);
    for (int c = 0; c < nc; ++c) {
      const double kd = etar_c[c] * dV;
      if (kd == 0.0) continue;
      for (int a = K.row_ptr[c]; a < K.row_ptr[c + 1]; ++a) {
        for (int b = K.row_ptr[c]; b < K.row_ptr[c + 1]; ++b)
          tri.push_back(
              {K.col_idx[a], K.col_idx[b], kd * K.val[a] * K.val[b]});
        tri.push_back({K.col_idx[a], idx_w(c), -2.0 * kd * K.val[a]});
        tri.push_back({idx_w(c), K.col_idx[a], -2.0 * kd * K.val[a]});
      }
      tri.push_back({idx_w(c), idx_w(c), 4.0 * kd});
    }

    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const int c = g.cell(i, j);
        const int row = idx_w(c);
        tri.push_back({row, row, rho_nc[c] / h * dV});
        f[row] += rho_kc[c] / h * state_k.omega[c] * dV;

        const double ugradrho = divc_F[c] - rho_kc[c] * divc_u[c];
        tri.push_back(
            {row, row,
             0.5 * (divc_J[c] - (rho_nc[c] - rho_kc[c]) / h - ugradrho) * dV});

        const double fe = F.x[g.xface(i + 1, j)] * dy;
        const double fw = F.x[g.xface(i, j)] * dy;
        const double fn = F.y[g.yface(i, j + 1)] * dx;
        const double fs = F.y[g.yface(i, j)] * dx;
        add_convection(row, fe, fw, fn, fs, idx_w(g.cell(i + 1, j)),
                       idx_w(g.cell(i - 1, j)),
                       j + 1 < ny ? idx_w(g.cell(i, j + 1)) : -1,
                       j > 0 ? idx_w(g.cell(i, j - 1)) : -1);
        const double je = J.x[g.xface(i + 1, j)] * dy;
        const double jw = J.x[g.xface(i, j)] * dy;
        const double jn = J.y[g.yface(i, j + 1)] * dx;
        const double js = J.y[g.yface(i, j)] * dx;
        add_convection(row, je, jw, jn, js, idx_w(g.cell(i + 1, j)),
                       idx_w(g.cell(i - 1, j)),
                       j + 1 < ny ? idx_w(g.cell(i, j + 1)) : -1,
                       j > 0 ? idx_w(g.cell(i, j - 1)) : -1);
        tri.push_back({row, row, -divc_J[c] * dV});

        // (c_d + c_a) grad omega . grad z with face-averaged coefficient.
        const double ax = dV / (dx * dx), ay = dV / (dy * dy);
        const int cE = g.cell(i + 1, j), cW = g.cell(i - 1, j);
        const double mE = 0.5 * (mdiff_c[c] + mdiff_c[cE]);
        const double mW = 0.5 * (mdiff_c[c] + mdiff_c[cW]);
        tri.push_back({row, idx_w(cE), -mE * ax});
        tri.push_back({row, idx_w(cW), -mW * ax});
        double diag = (mE + mW) * ax;
        if (j + 1 < ny) {
          const int cN = g.cell(i, j + 1);
          const double mN = 0.5 * (mdiff_c[c] + mdiff_c[cN]);
          tri.push_back({row, idx_w(cN), -mN * ay});
          diag += mN * ay;
        }
        if (j > 0) {
          const int cS2 = g.cell(i, j - 1);
          const double mS = 0.5 * (mdiff_c[c] + mdiff_c[cS2]);
          tri.push_back({row, idx_w(cS2), -mS * ay});
          diag += mS * ay;
        }
        tri.push_back({row, row, diag});

        if (j == 0 || j == ny - 1) tri.push_back({row, row, dx});  // wall spin

        if (qreg) {
          tri.push_back({row, row, qw.zero[c] * dV});
          const double qE = qw.face_x[g.xface(i + 1, j)] * ax;
          const double qW = qw.face_x[g.xface(i, j)] * ax;
          tri.push_back({row, idx_w(cE), -qE});
          tri.push_back({row, idx_w(cW), -qW});
          double qdiag = qE + qW;
          if (j + 1 < ny) {
            const double qN = qw.face_y[g.yface(i, j + 1)] * ay;
            tri.push_back({row, idx_w(g.cell(i, j + 1)), -qN});
            qdiag += qN;
          }
          if (j > 0) {
            const double qS = qw.face_y[g.yface(i, j)] * ay;
            tri.push_back({row, idx_w(g.cell(i, j - 1)), -qS});
            qdiag += qS;
          }
          tri.push_back({row, row, qdiag});
        }
      }
  } else {
    for (int c = 0; c < nc; ++c) tri.push_back({idx_w(c), idx_w(c), dV});
  }

  // ---- discrete continuity rows (negated integrated divergence) ----
  std::vector<Triplet> btri;
  btri.reserve(static_cast<std::size_t>(nc) * 4);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int c = g.cell(i, j);
      btri.push_back({c, idx_u1(i, j), dy});
      btri.push_back({c, idx_u1(i + 1, j), -dy});
      if (j > 0) btri.push_back({c, idx_u2(i, j), dx});
      if (j + 1 < ny) btri.push_back({c, idx_u2(i, j + 1), -dx});
    }

  const SparseMatrix A = SparseMatrix::from_triplets(n, n, tri);
  const SparseMatrix B = SparseMatrix::from_triplets(nc, n, btri);
  const SaddleResult sr = solve_saddle(A, B, f, cfg.lin);

  MomentumResult out;
  out.u = g.make_faces();
  out.omega = g.make_cell();
  out.p = g.make_cell();
  for (int k = 0; k < n_u1; ++k) out.u.x[k] = sr.u[k];
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i) out.u.y[g.yface(i, j)] = sr.u[idx_u2(i, j)];
  for (int c = 0; c < nc; ++c) out.omega[c] = sr.u[idx_w(c)];
  for (int c = 0; c < nc; ++c) out.p[c] = sr.p[c];
  double fn2 = 0.0;
  for (double v : f) fn2 += v * v;
  out.lin_residual = sr.stats.residual / (1.0 + std::sqrt(fn2));
  return out;
}

namespace {

double combined_update_norm(const FacePair& u_new, const FacePair& u_old,
                            const CellField& w_new, const CellField& w_old,
                            const CellField& phi_new, const CellField& phi_old,
                            const BoundaryField& pb_new,
                            const BoundaryField& pb_old,
                            const BoundaryField& pt_new,
                            const BoundaryField& pt_old) {
  double d2 = 0.0, n2 = 0.0;
  auto acc = [&](const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a[i] - b[i];
      d2 += d * d;
      n2 += a[i] * a[i];
    }
  };
  acc(u_new.x.v, u_old.x.v);
  acc(u_new.y.v, u_old.y.v);
  acc(w_new.v, w_old.v);
  acc(phi_new.v, phi_old.v);
  acc(pb_new.v, pb_old.v);
  acc(pt_new.v, pt_old.v);
  return std::sqrt(d2) / (1.0 + std::sqrt(n2));
}

}  // namespace

std::pair<MixtureState, StepReport> step(const Grid& g,
                                         const MixtureState& state_k,
                                         const PhysParams& p,
                                         const StepConfig& cfg) {
  p.validate();
  cfg.validate();
  const bool obstacle = p.pot.kind == PotentialKind::Obstacle;
  constexpr int kMaxHalvings = 3;
  constexpr double kStallRatio = 0.9;
  constexpr int kStallRun = 5;

  double h_try = p.h;
  std::vector<double> history;
  for (int halvings = 0;; ++halvings) {
    PhysParams ph = p;
    ph.h = h_try;

    FacePair u_iter = state_k.u;
    CellField w_iter = state_k.omega;
    CellField phi_prev = state_k.phi;
    BoundaryField pb_prev = state_k.psi_bottom;
    BoundaryField pt_prev = state_k.psi_top;

    ChResult ch;
    MomentumResult mom;
    bool converged = false;
    bool inner_failed = false;
    int newton_total = 0, pdas_total = 0, iters = 0;
    double max_lin = 0.0, delta = 0.0, delta_prev = 0.0;
    int stall = 0;
    try {
      for (iters = 1; iters <= cfg.picard_max; ++iters) {
        ch = obstacle ? pdas_ch_substep(g, state_k, u_iter, ph, cfg)
                      : ch_substep(g, state_k, u_iter, ph, cfg);
        mom = momentum_substep(g, state_k, ch, u_iter, w_iter, ph, cfg);
        newton_total += ch.newton_iters;
        pdas_total += ch.pdas_iters;
        max_lin = std::max({max_lin, ch.lin_residual, mom.lin_residual});

        delta = combined_update_norm(mom.u, u_iter, mom.omega, w_iter, ch.phi,
                                     phi_prev, ch.psi_bottom, pb_prev,
                                     ch.psi_top, pt_prev);
        history.push_back(delta);
        if (delta <= cfg.picard_tol) {
          converged = true;
          break;
        }
        stall = (iters > 1 && delta > kStallRatio * delta_prev) ? stall + 1 : 0;
        if (stall >= kStallRun) break;
        delta_prev = delta;

        const double a = cfg.under_relaxation;
        for (std::size_t k = 0; k < u_iter.x.v.size(); ++k)
          u_iter.x.v[k] += a * (mom.u.x.v[k] - u_iter.x.v[k]);
        for (std::size_t k = 0; k < u_iter.y.v.size(); ++k)
          u_iter.y.v[k] += a * (mom.u.y.v[k] - u_iter.y.v[k]);
        for (std::size_t k = 0; k < w_iter.v.size(); ++k)
          w_iter.v[k] += a * (mom.omega.v[k] - w_iter.v[k]);
        phi_prev = ch.phi;
        pb_prev = ch.psi_bottom;
        pt_prev = ch.psi_top;
      }
    } catch (const NewtonDiverged&) {
      if (halvings >= kMaxHalvings) throw;
      inner_failed = true;
    } catch (const PdasCycled&) {
      if (halvings >= kMaxHalvings) throw;
      inner_failed = true;
    }

    if (!converged || inner_failed) {
      if (!inner_failed && halvings >= kMaxHalvings)
        throw PicardDiverged(
            "coupled fixed-point iteration stalled after step halving",
            history);
      h_try *= 0.5;
      continue;
    }

    MixtureState sn = MixtureState::make(g);
    sn.t = state_k.t + h_try;
    sn.u = mom.u;
    sn.p = mom.p;
    sn.omega = mom.omega;
    sn.phi = ch.phi;
    sn.mu = ch.mu;
    sn.xi = ch.xi;
    sn.psi_bottom = ch.psi_bottom;
    sn.psi_top = ch.psi_top;
    sn.Lpsi_bottom = ch.Lpsi_bottom;
    sn.Lpsi_top = ch.Lpsi_top;
    sn.xi_bottom = ch.xi_bottom;
    sn.xi_top = ch.xi_top;

    LedgerFlags flags;
    flags.sigma_on = cfg.enable_sigma_regulariser;
    flags.eps_on = cfg.enable_q_regulariser;
    flags.boundary_frozen = cfg.freeze_boundary_data;
    const StepLedger led = step_ledger(g, state_k, sn, ph, h_try, flags);

    StepReport rep;
    rep.t = sn.t;
    rep.h_used = h_try;
    rep.picard_iters = iters;
    rep.newton_iters = newton_total;
    rep.pdas_iters = pdas_total;
    rep.halvings = halvings;
    rep.picard_update = delta;
    rep.max_lin_residual = max_lin;
    rep.energy = total_energy(g, sn, ph);
    rep.dissipation = led.dissipation;
    rep.slack = led.slack;
    rep.work_input = led.work_input;
    const double dV = g.cell_volume();
    for (int c = 0; c < g.cells(); ++c)
      rep.mass_drift_step += (sn.phi[c] - state_k.phi[c]) * dV;
    rep.phi_min = *std::min_element(sn.phi.v.begin(), sn.phi.v.end());
    rep.phi_max = *std::max_element(sn.phi.v.begin(), sn.phi.v.end());
    const double escale = 1.0 + std::abs(led.energy_old);
    const double rate_floor = -1e-14 * escale / h_try;
    const DissipationBreakdown& d = led.dissipation;
    rep.ledger_ok =
        rep.slack >= -1e-8 * escale && d.chemical >= rate_floor &&
        d.shear >= rate_floor && d.exchange >= rate_floor &&
        d.micro_div >= rate_floor && d.micro_sym >= rate_floor &&
        d.micro_skew >= rate_floor && d.wall_slip >= rate_floor &&
        d.wall_spin >= rate_floor && d.wall_ac >= rate_floor &&
        d.sigma_extra >= rate_floor && d.eps_extra >= rate_floor &&
        d.increment_extra >= -1e-14 * escale;
    return {std::move(sn), rep};
  }
}

}  // namespace mpnsch

#include "mpnsch/driver.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "mpnsch/errors.hpp"
#include "mpnsch/linsolve.hpp"
#include "mpnsch/obstacle.hpp"
#include "mpnsch/output.hpp"
#include "mpnsch/stepper.hpp"

namespace mpnsch {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string resolve_outdir(const RunConfig& cfg) {
  if (const char* env = std::getenv("MPNSCH_OUTDIR"))
    if (*env != '\0') return env;
  return cfg.io.outdir;
}

double total_mass(const Grid& g, const CellField& phi) {
  double m = 0.0;
  for (int c = 0; c < g.cells(); ++c) m += phi[c];
  return m * g.cell_volume();
}

std::string step_report_text(int k, const StepReport& r) {
  std::ostringstream o;
  o << "step " << k << " report:\n"
    << "  t = " << fmt(r.t) << ", h_used = " << fmt(r.h_used)
    << ", halvings = " << r.halvings << "\n"
    << "  picard_iters = " << r.picard_iters
    << ", newton_iters = " << r.newton_iters
    << ", pdas_iters = " << r.pdas_iters << "\n"
    << "  picard_update = " << fmt(r.picard_update)
    << ", max_lin_residual = " << fmt(r.max_lin_residual) << "\n"
    << "  energy: kinetic = " << fmt(r.energy.kinetic)
    << ", micro_rotational = " << fmt(r.energy.micro_rotational) << ",\n"
    << "          bulk_gradient = " << fmt(r.energy.bulk_gradient)
    << ", bulk_potential = " << fmt(r.energy.bulk_potential) << ",\n"
    << "          surface_gradient = " << fmt(r.energy.surface_gradient)
    << ", surface_potential = " << fmt(r.energy.surface_potential) << ",\n"
    << "          total = " << fmt(r.energy.total) << "\n"
    << "  dissipation: chemical = " << fmt(r.dissipation.chemical)
    << ", shear = " << fmt(r.dissipation.shear)
    << ", exchange = " << fmt(r.dissipation.exchange) << ",\n"
    << "               micro_div = " << fmt(r.dissipation.micro_div)
    << ", micro_sym = " << fmt(r.dissipation.micro_sym)
    << ", micro_skew = " << fmt(r.dissipation.micro_skew) << ",\n"
    << "               wall_slip = " << fmt(r.dissipation.wall_slip)
    << ", wall_spin = " << fmt(r.dissipation.wall_spin)
    << ", wall_ac = " << fmt(r.dissipation.wall_ac) << ",\n"
    << "               sigma_extra = " << fmt(r.dissipation.sigma_extra)
    << ", eps_extra = " << fmt(r.dissipation.eps_extra)
    << ", increment_extra = " << fmt(r.dissipation.increment_extra) << "\n"
    << "  slack = " << fmt(r.slack)
    << ", work_input = " << fmt(r.work_input) << "\n"
    << "  mass_drift_step = " << fmt(r.mass_drift_step)
    << ", phi in [" << fmt(r.phi_min) << ", " << fmt(r.phi_max) << "]\n"
    << "  ledger_ok = " << (r.ledger_ok ? "true" : "false") << "\n";
  return o.str();
}

}  // namespace

RunResult run_simulation(const RunConfig& cfg) {
  cfg.validate();
  const Grid g = Grid::make(cfg.grid.Lx, cfg.grid.Ly, cfg.grid.nx, cfg.grid.ny);
  MixtureState s = make_initial_state(g, cfg);

  const std::string outdir = resolve_outdir(cfg);
  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (ec)
    throw ConfigError("cannot create output directory '" + outdir +
                      "': " + ec.message());
  std::ofstream csv(outdir + "/diagnostics.csv", std::ios::binary);
  if (!csv) throw ConfigError("cannot open '" + outdir + "/diagnostics.csv'");
  csv << csv_header();
  write_vtk(outdir + "/snap_0.vtk", g, s);

  const double mass0 = total_mass(g, s.phi);
  for (int k = 1; k <= cfg.n_steps; ++k) {
    StepReport rep;
    try {
      auto [s_new, r] = step(g, s, cfg.physics, cfg.stepping);
      s = std::move(s_new);
      rep = r;
    } catch (const PicardDiverged& e) {
      return {3, "step " + std::to_string(k) + " failed: " + e.what()};
    } catch (const NewtonDiverged& e) {
      return {3, "step " + std::to_string(k) + " failed: " + e.what()};
    } catch (const PdasCycled& e) {
      return {3, "step " + std::to_string(k) + " failed: " + e.what()};
    } catch (const SolveError& e) {
      return {3, "step " + std::to_string(k) + " failed: " + e.what()};
    } catch (const DomainError& e) {
      return {3, "step " + std::to_string(k) + " failed: " + e.what()};
    } catch (const InfeasibleState& e) {
      return {3, "step " + std::to_string(k) + " failed: " + e.what()};
    }
    const double drift = total_mass(g, s.phi) - mass0;
    if (k % cfg.io.csv_stride == 0 || k == cfg.n_steps || !rep.ledger_ok)
      csv << csv_row(rep, drift);
    if (cfg.io.snapshot_stride > 0 && k % cfg.io.snapshot_stride == 0)
      write_vtk(outdir + "/snap_" + std::to_string(k) + ".vtk", g, s);
    if (!rep.ledger_ok)
      return {4, "energy ledger violated at step " + std::to_string(k) +
                     "\n" + step_report_text(k, rep)};
  }
  write_vtk(outdir + "/snap_final.vtk", g, s);
  return {0, "completed " + std::to_string(cfg.n_steps) + " steps, t = " +
                 fmt(s.t) + ", output in " + outdir};
}

RunResult run_sweep(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.physics.pot.kind != PotentialKind::Obstacle)
    throw ConfigError(
        "the deep-quench sweep needs potential.kind = obstacle as reference");
  const Grid g = Grid::make(cfg.grid.Lx, cfg.grid.Ly, cfg.grid.nx, cfg.grid.ny);
  const MixtureState s0 = make_initial_state(g, cfg);

  const std::vector<double> thetas = {0.3, 0.1, 0.03, 0.01};
  std::vector<DeepQuenchRow> rows;
  try {
    rows = deep_quench_sweep(g, s0, thetas, cfg.physics, cfg.stepping,
                             cfg.n_steps);
  } catch (const PicardDiverged& e) {
    return {3, std::string("sweep failed: ") + e.what()};
  } catch (const NewtonDiverged& e) {
    return {3, std::string("sweep failed: ") + e.what()};
  } catch (const PdasCycled& e) {
    return {3, std::string("sweep failed: ") + e.what()};
  } catch (const SolveError& e) {
    return {3, std::string("sweep failed: ") + e.what()};
  }

  const std::string outdir = resolve_outdir(cfg);
  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (ec)
    throw ConfigError("cannot create output directory '" + outdir +
                      "': " + ec.message());
  std::ofstream out(outdir + "/sweep.csv", std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + outdir + "/sweep.csv'");
  out << "theta,l2_error\n";
  std::ostringstream table;
  table << "theta        ||phi_theta - phi_obstacle||_L2\n";
  for (const auto& r : rows) {
    out << fmt(r.theta) << ',' << fmt(r.l2_error) << '\n';
    table << fmt(r.theta) << "  " << fmt(r.l2_error) << '\n';
  }
  return {0, table.str()};
}

}  // namespace mpnsch

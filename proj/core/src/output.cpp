#include "mpnsch/output.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "mpnsch/errors.hpp"

namespace mpnsch {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string csv_header() {
  return "t,h_used,picard_iters,newton_iters,pdas_iters,halvings,"
         "picard_update,max_lin_residual,"
         "energy_kinetic,energy_micro_rotational,energy_bulk_gradient,"
         "energy_bulk_potential,energy_surface_gradient,"
         "energy_surface_potential,energy_total,"
         "diss_chemical,diss_shear,diss_exchange,diss_micro_div,"
         "diss_micro_sym,diss_micro_skew,diss_wall_slip,diss_wall_spin,"
         "diss_wall_ac,diss_sigma_extra,diss_eps_extra,diss_increment_extra,"
         "slack,work_input,mass_drift_step,mass_drift_total,"
         "phi_min,phi_max,ledger_ok\n";
}

std::string csv_row(const StepReport& r, double mass_drift_total) {
  std::ostringstream o;
  o << fmt(r.t) << ',' << fmt(r.h_used) << ',' << r.picard_iters << ','
    << r.newton_iters << ',' << r.pdas_iters << ',' << r.halvings << ','
    << fmt(r.picard_update) << ',' << fmt(r.max_lin_residual) << ','
    << fmt(r.energy.kinetic) << ',' << fmt(r.energy.micro_rotational) << ','
    << fmt(r.energy.bulk_gradient) << ',' << fmt(r.energy.bulk_potential)
    << ',' << fmt(r.energy.surface_gradient) << ','
    << fmt(r.energy.surface_potential) << ',' << fmt(r.energy.total) << ','
    << fmt(r.dissipation.chemical) << ',' << fmt(r.dissipation.shear) << ','
    << fmt(r.dissipation.exchange) << ',' << fmt(r.dissipation.micro_div)
    << ',' << fmt(r.dissipation.micro_sym) << ','
    << fmt(r.dissipation.micro_skew) << ',' << fmt(r.dissipation.wall_slip)
    << ',' << fmt(r.dissipation.wall_spin) << ','
    << fmt(r.dissipation.wall_ac) << ',' << fmt(r.dissipation.sigma_extra)
    << ',' << fmt(r.dissipation.eps_extra) << ','
    << fmt(r.dissipation.increment_extra) << ',' << fmt(r.slack) << ','
    << fmt(r.work_input) << ',' << fmt(r.mass_drift_step) << ','
    << fmt(mass_drift_total) << ',' << fmt(r.phi_min) << ','
    << fmt(r.phi_max) << ',' << (r.ledger_ok ? 1 : 0) << '\n';
  return o.str();
}

void write_vtk(const std::string& path, const Grid& g,
               const MixtureState& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");

  out << "# vtk DataFile Version 3.0\n";
  out << "micropolar mixture state t = " << fmt(s.t) << "\n";
  out << "ASCII\n";
  out << "DATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS " << g.nx << ' ' << g.ny << " 1\n";
  out << "ORIGIN " << fmt(0.5 * g.dx) << ' ' << fmt(0.5 * g.dy) << " 0\n";
  out << "SPACING " << fmt(g.dx) << ' ' << fmt(g.dy) << " 1\n";
  out << "POINT_DATA " << g.cells() << "\n";

  auto scalars = [&](const char* name, const CellField& f) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) out << fmt(f[g.cell(i, j)]) << "\n";
  };
  scalars("phi", s.phi);
  scalars("mu", s.mu);
  scalars("omega", s.omega);
  scalars("p", s.p);

  out << "VECTORS velocity double\n";
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double ux =
          0.5 * (s.u.x[g.xface(i, j)] + s.u.x[g.xface(i + 1, j)]);
      const double uy =
          0.5 * (s.u.y[g.yface(i, j)] + s.u.y[g.yface(i, j + 1)]);
      out << fmt(ux) << ' ' << fmt(uy) << " 0\n";
    }
  if (!out) throw ConfigError("failed while writing '" + path + "'");
}

}  // namespace mpnsch

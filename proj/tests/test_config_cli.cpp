#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mpnsch/cli.hpp"
#include "mpnsch/config.hpp"
#include "mpnsch/driver.hpp"
#include "mpnsch/errors.hpp"
#include "mpnsch/output.hpp"
#include "mpnsch/scenarios.hpp"
#include "mpnsch/stepper.hpp"

using namespace mpnsch;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s)
    if (c == '\n') ++n;
  return n;
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("mpnsch_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_file(const fs::path& dir, const std::string& name,
                    const std::string& text) {
  const fs::path p = dir / name;
  std::ofstream out(p);
  out << text;
  return p;
}

int cli(std::vector<const char*> argv) {
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

RunConfig tiny_equilibrium() {
  RunConfig c = scenario("equilibrium");
  c.grid.nx = 8;
  c.grid.ny = 8;
  c.n_steps = 2;
  return c;
}

}  // namespace

TEST_CASE("config text round-trips through parse and render") {
  for (const std::string& name : scenario_names()) {
    const RunConfig c = scenario(name);
    const std::string once = render_config(c);
    const RunConfig back = parse_config(once);
    CHECK(render_config(back) == once);
  }
  // Values survive exactly (17 significant digits).
  RunConfig c = scenario("droplet_wall");
  c.physics.h = 1.0 / 3.0;
  c.initial.radius = 0.1 + 1e-16;
  const RunConfig back = parse_config(render_config(c));
  CHECK(back.physics.h == c.physics.h);
  CHECK(back.initial.radius == c.initial.radius);
  CHECK(back.physics.pot.kind == c.physics.pot.kind);
  CHECK(back.physics.bpot.kind == c.physics.bpot.kind);
}

TEST_CASE("config parser reports precise errors") {
  auto line_of = [](const std::string& text) {
    try {
      (void)parse_config(text);
      return -1;
    } catch (const ParseError& e) {
      return e.line;
    }
  };
  CHECK(line_of("grid.nx = 8\nnope.key = 1\n") == 2);       // unknown key
  CHECK(line_of("grid.nx = 8\ngrid.nx = 9\n") == 2);        // duplicate
  CHECK(line_of("grid.Lx = twelve\n") == 1);                // bad number
  CHECK(line_of("grid.nx 8\n") == 1);                       // missing '='
  CHECK(line_of("stepping.solve_omega = maybe\n") == 1);    // bad bool
  CHECK(line_of("potential.kind = cubic\n") == 1);          // bad enum
  CHECK(line_of("grid.nx = 8.5\n") == 1);                   // non-integer
  // Comments and blank lines are fine.
  CHECK_NOTHROW((void)parse_config("# comment\n\ngrid.nx = 8\n"));
}

TEST_CASE("config validation gathers every problem at once") {
  RunConfig c = scenario("equilibrium");
  c.grid.nx = 3;        // too coarse
  c.physics.h = -1.0;   // bad step
  c.n_steps = 0;        // nothing to do
  try {
    c.validate();
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.problems.size() >= 3);
  }
}

TEST_CASE("initial states: shapes, bounds, determinism") {
  const RunConfig base = scenario("spinodal");
  const Grid g = Grid::make(base.grid.Lx, base.grid.Ly, 16, 8);

  SUBCASE("uniform fills cells and traces") {
    RunConfig c = base;
    c.initial = {InitialKind::Uniform, 0.25, 0.0, 1, 0.25, 1.0, 0.05};
    const MixtureState s = make_initial_state(g, c);
    for (int i = 0; i < g.cells(); ++i) CHECK(s.phi[i] == 0.25);
    for (int i = 0; i < g.nx; ++i) {
      CHECK(s.psi_bottom.v[i] == 0.25);
      CHECK(s.psi_top.v[i] == 0.25);
    }
    c.initial.value = 1.0;  // mean must stay strictly inside (-1, 1)
    CHECK_THROWS_AS((void)make_initial_state(g, c), ValidationError);
  }

  SUBCASE("spinodal noise is seeded and bounded") {
    const MixtureState a = make_initial_state(g, base);
    const MixtureState b = make_initial_state(g, base);
    CHECK(a.phi.v == b.phi.v);  // deterministic for a fixed seed
    double mean = 0.0;
    for (int i = 0; i < g.cells(); ++i) {
      CHECK(std::fabs(a.phi[i] - base.initial.value) <=
            base.initial.amplitude + 1e-15);
      mean += a.phi[i];
    }
    mean /= g.cells();
    CHECK(std::fabs(mean - base.initial.value) <= base.initial.amplitude);
    RunConfig other = base;
    other.initial.seed += 1;
    const MixtureState c2 = make_initial_state(g, other);
    CHECK(c2.phi.v != a.phi.v);
  }

  SUBCASE("droplet and stripe profiles saturate correctly") {
    RunConfig c = base;
    c.initial = {InitialKind::DropletWall, 0.0, 0.0, 1, 0.25, 1.0, 0.05};
    const MixtureState s = make_initial_state(g, c);
    // Inside the droplet (on the bottom wall at x = 1) the phase is near +1,
    // far away near -1; everything stays inside [-1, 1].
    double at_center = -2.0, far_away = 2.0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double v = s.phi[g.cell(i, j)];
        CHECK(std::fabs(v) <= 1.0);
        if (j == 0 && std::fabs(g.x_cell(i) - 1.0) < g.dx) at_center = v;
        if (j == g.ny - 1 && std::fabs(g.x_cell(i) - 2.0) < g.dx)
          far_away = v;
      }
    CHECK(at_center > 0.9);
    CHECK(far_away < -0.9);

    c.initial.kind = InitialKind::Stripe;
    c.initial.radius = 0.5;
    const MixtureState st = make_initial_state(g, c);
    CHECK(st.phi[g.cell(g.nx / 2, g.ny / 2)] > 0.9);   // x near 1
    CHECK(st.phi[g.cell(0, g.ny / 2)] < -0.9);          // x near 0
  }
}

TEST_CASE("diagnostics CSV: frozen header and round-trip rows") {
  CHECK(csv_header() ==
        "t,h_used,picard_iters,newton_iters,pdas_iters,halvings,"
        "picard_update,max_lin_residual,energy_kinetic,"
        "energy_micro_rotational,energy_bulk_gradient,energy_bulk_potential,"
        "energy_surface_gradient,energy_surface_potential,energy_total,"
        "diss_chemical,diss_shear,diss_exchange,diss_micro_div,"
        "diss_micro_sym,diss_micro_skew,diss_wall_slip,diss_wall_spin,"
        "diss_wall_ac,diss_sigma_extra,diss_eps_extra,diss_increment_extra,"
        "slack,work_input,mass_drift_step,mass_drift_total,phi_min,phi_max,"
        "ledger_ok\n");

  StepReport r;
  r.t = 1.0 / 3.0;
  r.h_used = 1e-3;
  r.picard_iters = 4;
  r.energy.total = -0.125;
  r.slack = 3.5e-17;
  r.phi_min = -0.999;
  r.phi_max = 0.998;
  r.ledger_ok = true;
  const std::string row = csv_row(r, 2.25e-13);
  CHECK(row.back() == '\n');
  // 34 comma-separated fields, matching the header.
  int commas = 0;
  for (char ch : row)
    if (ch == ',') ++commas;
  CHECK(commas == 33);
  int hcommas = 0;
  for (char ch : csv_header())
    if (ch == ',') ++hcommas;
  CHECK(hcommas == 33);
  // %.17g round-trips doubles exactly.
  std::istringstream ss(row);
  std::string field;
  std::getline(ss, field, ',');
  CHECK(std::strtod(field.c_str(), nullptr) == r.t);
  std::getline(ss, field, ',');
  CHECK(std::strtod(field.c_str(), nullptr) == r.h_used);
  // Last field is the ledger flag.
  CHECK(row.substr(row.size() - 2) == "1\n");
}

TEST_CASE("VTK snapshots carry the full cell-centred state") {
  const Grid g = Grid::make(2.0, 1.0, 8, 4);
  MixtureState s = MixtureState::make(g);
  s.phi.fill(0.5);
  s.u.x.fill(1.0);
  const fs::path dir = fresh_dir("vtk");
  const fs::path file = dir / "snap_test.vtk";
  write_vtk(file.string(), g, s);
  const std::string text = slurp(file);
  CHECK(text.rfind("# vtk DataFile Version 3.0", 0) == 0);
  CHECK(text.find("ASCII") != std::string::npos);
  CHECK(text.find("DATASET STRUCTURED_POINTS") != std::string::npos);
  CHECK(text.find("DIMENSIONS 8 4 1") != std::string::npos);
  CHECK(text.find("POINT_DATA 32") != std::string::npos);
  for (const char* field : {"SCALARS phi double 1", "SCALARS mu double 1",
                            "SCALARS omega double 1", "SCALARS p double 1"}) {
    CHECK(text.find(field) != std::string::npos);
  }
  CHECK(text.find("VECTORS velocity double") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("simulation driver writes artifacts and honours MPNSCH_OUTDIR") {
  RunConfig c = tiny_equilibrium();
  c.io.snapshot_stride = 1;
  const fs::path dir = fresh_dir("driver");
  c.io.outdir = (dir / "configured").string();

  SUBCASE("configured outdir") {
    unsetenv("MPNSCH_OUTDIR");
    const RunResult res = run_simulation(c);
    CAPTURE(res.message);
    CHECK(res.exit_code == 0);
    const std::string csv = slurp(dir / "configured" / "diagnostics.csv");
    CHECK(count_lines(csv) == 1 + c.n_steps);
    CHECK(csv.rfind("t,h_used", 0) == 0);
    CHECK(fs::exists(dir / "configured" / "snap_0.vtk"));
    CHECK(fs::exists(dir / "configured" / "snap_1.vtk"));
    CHECK(fs::exists(dir / "configured" / "snap_final.vtk"));
  }

  SUBCASE("environment override wins") {
    const fs::path over = dir / "override";
    setenv("MPNSCH_OUTDIR", over.string().c_str(), 1);
    const RunResult res = run_simulation(c);
    unsetenv("MPNSCH_OUTDIR");
    CHECK(res.exit_code == 0);
    CHECK(fs::exists(over / "diagnostics.csv"));
    CHECK_FALSE(fs::exists(dir / "configured" / "diagnostics.csv"));
  }
  fs::remove_all(dir);
}

TEST_CASE("command line: subcommands and exit codes") {
  const fs::path dir = fresh_dir("cli");
  const fs::path out = dir / "out";
  setenv("MPNSCH_OUTDIR", out.string().c_str(), 1);

  const fs::path good =
      write_file(dir, "good.conf", render_config(tiny_equilibrium()));

  CHECK(cli({"mpnsch"}) == 2);
  CHECK(cli({"mpnsch", "frobnicate"}) == 2);
  CHECK(cli({"mpnsch", "run"}) == 2);
  CHECK(cli({"mpnsch", "check", good.string().c_str()}) == 0);
  CHECK(cli({"mpnsch", "check", (dir / "missing.conf").string().c_str()}) ==
        2);
  CHECK(cli({"mpnsch", "scenario", "nosuch"}) == 2);
  CHECK(cli({"mpnsch", "scenario", "equilibrium", "--emit-config"}) == 0);

  CHECK(cli({"mpnsch", "run", good.string().c_str()}) == 0);
  CHECK(fs::exists(out / "diagnostics.csv"));

  // Malformed and invalid configurations map to exit 2.
  const fs::path bad = write_file(dir, "bad.conf", "grid.nx = banana\n");
  CHECK(cli({"mpnsch", "run", bad.string().c_str()}) == 2);
  const fs::path coarse = write_file(dir, "coarse.conf", "grid.nx = 2\n");
  CHECK(cli({"mpnsch", "check", coarse.string().c_str()}) == 2);

  // Sweep demands the obstacle potential.
  CHECK(cli({"mpnsch", "sweep", good.string().c_str()}) == 2);

  // A solver failure surfaces as exit 3: one Newton iteration cannot solve
  // the first implicit system, and the halving budget runs out.
  RunConfig hard = scenario("spinodal");
  hard.grid.nx = 8;
  hard.grid.ny = 8;
  hard.n_steps = 1;
  hard.stepping.newton_max = 1;
  const fs::path hardp = write_file(dir, "hard.conf", render_config(hard));
  CHECK(cli({"mpnsch", "run", hardp.string().c_str()}) == 3);

  unsetenv("MPNSCH_OUTDIR");
  fs::remove_all(dir);
}

TEST_CASE("scenario catalogue is closed and validated") {
  const std::vector<std::string> names = scenario_names();
  CHECK(names.size() == 5);
  for (const std::string& n : names) {
    const RunConfig c = scenario(n);
    CHECK_NOTHROW(c.validate());
  }
  CHECK_THROWS_AS((void)scenario("unknown"), ConfigError);
}

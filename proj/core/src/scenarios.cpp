#include "mpnsch/scenarios.hpp"

#include "mpnsch/errors.hpp"

namespace mpnsch {

namespace {

// Shared baseline: [0,2) x [0,1] on 64 x 32 cells, unit coefficients,
// h = 1e-3 for 50 steps. The tight Picard tolerance keeps the fixed-point
// error far below the energy-ledger slack tolerance.
RunConfig baseline(const std::string& name) {
  RunConfig c;
  c.grid = {2.0, 1.0, 64, 32};
  c.physics.h = 1e-3;
  c.n_steps = 50;
  c.stepping.picard_tol = 1e-10;
  c.io.outdir = "out_" + name;
  c.io.snapshot_stride = 0;
  c.io.csv_stride = 1;
  return c;
}

}  // namespace

std::vector<std::string> scenario_names() {
  return {"equilibrium", "spinodal", "droplet_wall", "micropolar_channel",
          "deep_quench"};
}

RunConfig scenario(const std::string& name) {
  if (name == "equilibrium") {
    // Uniform critical mixture at rest: every force vanishes identically,
    // so the run certifies a machine-zero energy ledger.
    RunConfig c = baseline(name);
    c.physics.pot = SplitPotential::logarithmic(0.3, 1.0);
    c.physics.bpot = BoundaryPotential::affine(1.0, 1.0, 1.0);
    c.initial.kind = InitialKind::Uniform;
    c.initial.value = 0.0;
    c.validate();
    return c;
  }
  if (name == "spinodal") {
    // Unstable critical mixture with small noise and a 2:1 density contrast;
    // exercises the diffusive flux and the stabilised convection while the
    // phase stays inside [-1,1], where the density is exactly affine.
    RunConfig c = baseline(name);
    c.physics.pot = SplitPotential::logarithmic(0.3, 1.0);
    c.physics.bpot = BoundaryPotential::affine(1.0, 1.0, 1.0);
    c.physics.rho1 = 2.0;
    c.physics.rho2 = 1.0;
    c.initial.kind = InitialKind::Spinodal;
    c.initial.value = 0.0;
    c.initial.amplitude = 0.05;
    c.initial.seed = 20240817;
    c.validate();
    return c;
  }
  if (name == "droplet_wall") {
    // Semicircular droplet sitting on the bottom wall with asymmetric
    // wetting energies: the contact line moves under the wall chemical
    // potential. Matched densities keep the kinetic-energy bookkeeping
    // exact while the regularised potential lets phi overshoot [-1,1].
    RunConfig c = baseline(name);
    c.physics.pot = SplitPotential::kappa_regularised(0.3, 1.0, 0.1);
    c.physics.bpot = BoundaryPotential::sine(1.2, 0.8, 1.0);
    c.initial.kind = InitialKind::DropletWall;
    c.initial.radius = 0.25;
    c.initial.center_x = 1.0;
    c.initial.width = 0.05;
    c.validate();
    return c;
  }
  if (name == "micropolar_channel") {
    // Single fluid (uniform phase just inside the admissible mean range)
    // driven by a horizontal body force between the two walls; exercises
    // the velocity / micro-rotation exchange and the slip conditions.
    RunConfig c = baseline(name);
    c.physics.pot = SplitPotential::kappa_regularised(0.3, 1.0, 0.1);
    c.physics.bpot = BoundaryPotential::sine(1.0, 1.0, 1.0);
    c.physics.body_force_x = 1.0;
    c.initial.kind = InitialKind::Uniform;
    c.initial.value = 1.0 - 1e-9;
    c.validate();
    return c;
  }
  if (name == "deep_quench") {
    // Vertical stripe under the double-obstacle potential; the sweep driver
    // reuses this configuration as the reference for the theta -> 0 limit.
    RunConfig c = baseline(name);
    c.physics.pot = SplitPotential::obstacle(1.0);
    c.physics.pot.theta = 0.3;  // largest sweep temperature
    c.physics.bpot = BoundaryPotential::affine(1.0, 1.0, 1.0);
    c.initial.kind = InitialKind::Stripe;
    c.initial.radius = 0.5;
    c.initial.center_x = 1.0;
    c.initial.width = 0.05;
    c.n_steps = 5;
    c.validate();
    return c;
  }
  std::string names;
  for (const auto& n : scenario_names()) names += " " + n;
  throw ConfigError("unknown scenario '" + name + "'; available:" + names);
}

}  // namespace mpnsch

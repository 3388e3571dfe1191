#pragma once

// Run configuration and its text format.
//
// The format is line based: `section.key = value`, `#` starts a comment,
// blank lines are ignored, keys are case-sensitive. Unknown keys, duplicate
// keys and malformed values are hard errors carrying the line number.
// render_config produces a canonical form (17 significant digits) such that
// parse_config(render_config(c)) reproduces c exactly.

#include <cstdint>
#include <string>

#include "mpnsch/grid.hpp"
#include "mpnsch/state.hpp"
#include "mpnsch/stepper.hpp"

namespace mpnsch {

enum class InitialKind { Uniform, Spinodal, DropletWall, Stripe };

// Parameters of the named initial phase profiles. All profiles start from
// rest (u = 0) with omega = curl(u)/2 = 0 and the wall trace psi equal to
// the analytic profile evaluated on the wall.
struct InitialCondition {
  InitialKind kind = InitialKind::Uniform;
  double value = 0.0;        // Uniform: constant phase value
  double amplitude = 0.05;   // Spinodal: uniform noise amplitude
  std::uint64_t seed = 1;    // Spinodal: mt19937_64 seed
  double radius = 0.25;      // DropletWall: radius; Stripe: half-width
  double center_x = 1.0;     // droplet / stripe centre abscissa
  double width = 0.05;       // tanh interface width
};

struct GridConfig {
  double Lx = 2.0, Ly = 1.0;
  int nx = 64, ny = 32;
};

struct IoConfig {
  std::string outdir = ".";
  int snapshot_stride = 0;  // every k-th step also writes snap_<k>.vtk; 0 off
  int csv_stride = 1;       // diagnostics row every k-th step
};

struct RunConfig {
  GridConfig grid;
  PhysParams physics;  // includes the bulk and wall potentials and h
  StepConfig stepping;
  int n_steps = 1;
  IoConfig io;
  InitialCondition initial;

  // Throws ValidationError listing every violated constraint.
  void validate() const;
};

// Parse and validate. ParseError (with line number) for syntax problems,
// unknown keys, duplicates and unparsable values; ValidationError for
// well-formed but inadmissible parameter sets.
RunConfig parse_config(const std::string& text);

// Read a file and parse it; ConfigError when the file cannot be read.
RunConfig load_config(const std::string& path);

// Canonical text form, every key exactly once in a fixed order.
std::string render_config(const RunConfig& c);

// Build the initial state from the named profile. Enforces the admissibility
// of the initial mean: mean(phi0) must lie strictly inside (-1, 1).
MixtureState make_initial_state(const Grid& g, const RunConfig& c);

}  // namespace mpnsch

#pragma once

// Output writers: the per-step diagnostics CSV row and legacy ASCII VTK
// snapshots of the full state. All numbers use 17 significant digits so the
// files reproduce the in-memory doubles exactly.

#include <string>

#include "mpnsch/grid.hpp"
#include "mpnsch/state.hpp"
#include "mpnsch/stepper.hpp"

namespace mpnsch {

// Comma-separated column names; every StepReport field appears exactly once,
// plus the cumulative mass drift int(phi) - int(phi_0).
std::string csv_header();

// One diagnostics row matching csv_header ('\n'-terminated).
std::string csv_row(const StepReport& r, double mass_drift_total);

// STRUCTURED_POINTS snapshot at the cell centres: scalars phi, mu, omega, p
// and the face velocity averaged to the centres as a vector field. Throws
// ConfigError when the file cannot be opened for writing.
void write_vtk(const std::string& path, const Grid& g, const MixtureState& s);

}  // namespace mpnsch

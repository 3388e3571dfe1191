#pragma once

// Simulation driver: maps a validated RunConfig onto a full time-stepping
// run with CSV diagnostics and VTK snapshots, and onto the deep-quench
// temperature sweep.

#include <string>

#include "mpnsch/config.hpp"

namespace mpnsch {

struct RunResult {
  int exit_code = 0;    // 0 ok, 3 solver failure, 4 energy-ledger violation
  std::string message;  // summary on success, full step report on failure
};

// Execute the configured run. The environment variable MPNSCH_OUTDIR, when
// set and non-empty, overrides io.outdir. Writes diagnostics.csv (one row
// per csv_stride steps; the failing row is always written), snap_0.vtk,
// snap_final.vtk and snap_<k>.vtk every snapshot_stride steps. Returns
// exit code 0 only when every step converged and every step certified the
// energy ledger; the first failing step's report is placed in message.
// Configuration problems (unwritable output, inadmissible initial state)
// propagate as exceptions.
RunResult run_simulation(const RunConfig& cfg);

// Deep-quench sweep over the temperature ladder {0.3, 0.1, 0.03, 0.01}:
// one obstacle reference run plus one logarithmic run per temperature, all
// from the configured initial state. Requires the obstacle potential
// (ConfigError otherwise). Writes sweep.csv into the output directory and
// returns the table in message.
RunResult run_sweep(const RunConfig& cfg);

}  // namespace mpnsch

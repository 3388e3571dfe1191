#pragma once

// Error types shared across the library. Everything derives from
// std::runtime_error so callers can catch coarsely; the CLI maps the
// categories onto process exit codes.

#include <stdexcept>
#include <string>
#include <vector>

namespace mpnsch {

// A field was evaluated outside the domain of definition of a potential
// (e.g. logarithmic free energy at |s| >= 1).
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Field size does not match the grid it is used with.
struct SizeMismatch : std::runtime_error {
  explicit SizeMismatch(const std::string& what) : std::runtime_error(what) {}
};

// A boundary trace was required (ghost-cell closure) but not supplied.
struct MissingTrace : std::runtime_error {
  explicit MissingTrace(const std::string& what) : std::runtime_error(what) {}
};

// Operation not defined for the selected potential (e.g. smooth chemical
// force requested for the double-obstacle potential).
struct UnsupportedPotential : std::runtime_error {
  explicit UnsupportedPotential(const std::string& what)
      : std::runtime_error(what) {}
};

// Parameter set rejected by validation; carries one message per violation.
struct ValidationError : std::runtime_error {
  explicit ValidationError(std::vector<std::string> problems_)
      : std::runtime_error(join(problems_)), problems(std::move(problems_)) {}
  std::vector<std::string> problems;

 private:
  static std::string join(const std::vector<std::string>& ps) {
    std::string s = "invalid parameters:";
    for (const auto& p : ps) s += "\n  - " + p;
    return s;
  }
};

// Config file could not be parsed; carries the 1-based line number.
struct ParseError : std::runtime_error {
  ParseError(int line_, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_) + ": " + what),
        line(line_) {}
  int line;
};

// Config parsed but is not runnable (unknown scenario, bad sweep list, ...).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Newton iteration for the phase-field substep failed to converge; carries
// the residual-norm history for post-mortem reporting.
struct NewtonDiverged : std::runtime_error {
  NewtonDiverged(const std::string& what, std::vector<double> history_)
      : std::runtime_error(what), history(std::move(history_)) {}
  std::vector<double> history;
};

// Outer fixed-point (Picard) coupling iteration gave up after exhausting
// the step-halving budget.
struct PicardDiverged : std::runtime_error {
  PicardDiverged(const std::string& what, std::vector<double> history_)
      : std::runtime_error(what), history(std::move(history_)) {}
  std::vector<double> history;
};

// Primal-dual active set iteration revisited a configuration without
// converging (cycling) or exceeded its horizon.
struct PdasCycled : std::runtime_error {
  PdasCycled(const std::string& what, int iterations_)
      : std::runtime_error(what), iterations(iterations_) {}
  int iterations;
};

// A state handed to diagnostics violates hard feasibility (NaN/Inf fields,
// obstacle bounds broken beyond tolerance, ...).
struct InfeasibleState : std::runtime_error {
  explicit InfeasibleState(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace mpnsch

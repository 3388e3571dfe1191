#pragma once

// Double-obstacle branch: the phase field is constrained to [-1, 1] and the
// convex bulk force is replaced by the variational-inequality multiplier xi,
// computed with a primal-dual active set iteration (each inner iteration is
// one linear solve; the update rule is xi + c (phi -+ 1) with c = 1).

#include <cstdint>
#include <string>
#include <vector>

#include "mpnsch/grid.hpp"
#include "mpnsch/state.hpp"
#include "mpnsch/stepper.hpp"

namespace mpnsch {

// Active constraint sets over cells and, when the boundary potential is
// obstacle-constrained too, over the wall nodes. 0 = inactive, +1 = clamped
// at +1, -1 = clamped at -1.
struct ActiveSets {
  std::vector<std::int8_t> cells;
  std::vector<std::int8_t> bottom, top;

  bool operator==(const ActiveSets&) const = default;
};

// Counterpart of ch_substep for PotentialKind::Obstacle; fills ChResult::xi
// (and the boundary multipliers). Throws PdasCycled when the active sets do
// not settle within the iteration horizon. When sets_out is non-null it
// receives the converged active sets.
ChResult pdas_ch_substep(const Grid& g, const MixtureState& state_k,
                         const FacePair& u_iter, const PhysParams& p,
                         const StepConfig& cfg, ActiveSets* sets_out = nullptr);

// Pointwise complementarity audit of an obstacle-branch state:
//   |phi| <= 1 + tol,  xi >= -tol where phi ~ +1,  xi <= tol where phi ~ -1,
//   |xi| <= tol where |phi| < 1 - tol,
// and the same on the wall trace. Returns human-readable violations.
struct ComplementarityReport {
  bool ok = true;
  double worst = 0.0;  // largest violation magnitude
  std::vector<std::string> violations;
};
ComplementarityReport complementarity_check(const Grid& g,
                                            const MixtureState& s,
                                            double tol = 1e-8);

// Deep-quench comparison: one row per temperature theta.
struct DeepQuenchRow {
  double theta = 0.0;
  double l2_error = 0.0;  // ||phi_theta - phi_obstacle||_L2 at the final step
};

// Runs the obstacle solver once and the logarithmic solver per temperature,
// all from the same initial state, step size and step count, and reports the
// final-state L2 distance to the obstacle solution. theta_list must be
// strictly decreasing and positive (equal consecutive entries included);
// violations throw ConfigError.
std::vector<DeepQuenchRow> deep_quench_sweep(const Grid& g,
                                             const MixtureState& initial,
                                             const std::vector<double>& thetas,
                                             const PhysParams& base,
                                             const StepConfig& cfg,
                                             int n_steps);

}  // namespace mpnsch

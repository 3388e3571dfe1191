#pragma once

// Named, ready-to-run parameter sets covering the main regimes: a stationary
// equilibrium, spinodal decomposition with a density contrast, a wetting
// droplet with moving contact lines, a body-force-driven micropolar channel,
// and a deep-quench obstacle run.

#include <string>
#include <vector>

#include "mpnsch/config.hpp"

namespace mpnsch {

std::vector<std::string> scenario_names();

// Throws ConfigError listing the known names when `name` is unknown.
RunConfig scenario(const std::string& name);

}  // namespace mpnsch

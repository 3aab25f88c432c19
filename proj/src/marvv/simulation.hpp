#pragma once

#include <functional>

#include "marvv/log.hpp"
#include "marvv/scenario.hpp"

namespace marvv {

/// Stage letters in the order the loop executes them each tick.
inline constexpr const char* kPipelineOrder = "SFAPGCWD";

/// Builds the depth grid the scenario refers to (flat grids cover the whole area).
DepthGrid scenario_depth_grid(const Scenario& s);

/// Target truth at time t from its open-loop script.
TargetTruth target_state_at(const TargetSpec& spec, double t);

/// Fixed-step closed-loop run. A pure function of the scenario (seed included).
SimulationLog run(const Scenario& scenario);

}  // namespace marvv

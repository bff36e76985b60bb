#pragma once

#include "accsim/scenario.hpp"
#include "accsim/trace.hpp"

namespace accsim {

/// Runs the two-rate closed loop for the whole platoon: planners at
/// plan_dt, Algorithm 1/2 + PI(F) + actuator at control_dt, explicit Euler
/// integration with v clamped >= 0. The input is validated first (throws
/// ScenarioError). A collision (spacing <= 0) or a non-finite value stops
/// the run with the corresponding status and fail_tick.
PlatoonTrace run_platoon(const Scenario& scenario);

}  // namespace accsim

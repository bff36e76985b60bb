#pragma once

#include "accsim/mpc_planner.hpp"
#include "accsim/types.hpp"

namespace accsim {

/// Per-vehicle low-level controller state.
struct PidState {
  double v_pid = 0.0;      // internal speed setpoint [m/s]
  double a_pid = 0.0;      // internal acceleration setpoint [m/s^2]
  double integral = 0.0;   // accumulated error*dt [m/s * s]
  double last_control = 0.0;

  friend bool operator==(const PidState&, const PidState&) = default;
};

/// 100 Hz setpoint update for the linear-planner pipeline: the
/// overshoot-allowance snap-back block, then the rate-limit block that
/// walks v_pid toward v_target (landing on it when within reach).
/// Returns the updated v_pid (also stored in state).
double step_vpid_linear(PidState& state, double v_target, double v_ego,
                        const ControllerConfig& c, double dt);

/// 100 Hz setpoint interpolation for the MPC pipeline: linear a_pid ramp
/// from a_start toward a_target over one horizon step, v_pid as its exact
/// trapezoidal integral from the plan-tick anchors. t_hat is the last
/// plan-tick time, t the current tick time.
void step_setpoints_mpc(PidState& state, const StartState& start,
                        double a_target, double t_hat, double t,
                        const TimingConfig& timing);

/// P/I/F decomposition of one control output.
struct ControlTerms {
  double p = 0.0;
  double i = 0.0;
  double f = 0.0;
  double control = 0.0;
};

/// PI(F) law on the speed-setpoint error e = v_pid - v_ego: deadzone on e,
/// rectangular integration with the configured antiwindup, feedforward on
/// a_pid. Gains are evaluated at v_ego.
ControlTerms pif_control(PidState& state, double v_ego,
                         const ControllerConfig& c, double dt);

}  // namespace accsim

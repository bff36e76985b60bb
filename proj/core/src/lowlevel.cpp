#include "accsim/lowlevel.hpp"

#include <algorithm>
#include <cmath>

namespace accsim {

double step_vpid_linear(PidState& state, double v_target, double v_ego,
                        const ControllerConfig& c, double dt) {
  double v_pid = state.v_pid;
  const double oa = c.overshoot_allowance;
  // Snap-back: when the setpoint has drifted past the allowance band
  // around the measured speed and the target is on the other side, pull
  // it back to the band edge (or the target if that is nearer).
  if (v_pid > v_ego + oa && v_target < v_pid) {
    v_pid = std::max(v_target, v_ego + oa);
  } else if (v_pid < v_ego - oa && v_target > v_pid) {
    v_pid = std::min(v_target, v_ego - oa);
  }
  // Rate limit toward the target, landing on it when within reach.
  if (v_target > v_pid) {
    v_pid = std::min(v_target, v_pid + c.a_max * dt);
  } else if (v_target < v_pid) {
    v_pid = std::max(v_target, v_pid + c.a_min * dt);
  }
  state.v_pid = v_pid;
  return v_pid;
}

void step_setpoints_mpc(PidState& state, const StartState& start,
                        double a_target, double t_hat, double t,
                        const TimingConfig& timing) {
  const double dt = t - t_hat;
  state.a_pid = start.a_start + dt * (a_target - start.a_start) / timing.horizon_dt;
  state.v_pid = start.v_start + dt * (state.a_pid + start.a_start) / 2.0;
}

ControlTerms pif_control(PidState& state, double v_ego,
                         const ControllerConfig& c, double dt) {
  double e = state.v_pid - v_ego;
  if (std::abs(e) <= c.deadzone) e = 0.0;

  switch (c.antiwindup.mode) {
    case AntiWindupMode::kNone:
      state.integral += e * dt;
      break;
    case AntiWindupMode::kClamp:
      state.integral = std::clamp(state.integral + e * dt,
                                  -c.antiwindup.limit, c.antiwindup.limit);
      break;
    case AntiWindupMode::kFreeze: {
      // Hold the integral while the output is saturated and the error
      // keeps pushing further into saturation.
      const bool saturated = state.last_control > c.a_max ||
                             state.last_control < c.a_min;
      const bool pushing = e * state.last_control > 0.0;
      if (!(saturated && pushing)) state.integral += e * dt;
      break;
    }
  }

  ControlTerms out;
  out.p = c.kp(v_ego) * e;
  out.i = c.ki(v_ego) * state.integral;
  out.f = c.kf(v_ego) * state.a_pid;
  out.control = out.p + out.i + out.f;
  state.last_control = out.control;
  return out;
}

}  // namespace accsim

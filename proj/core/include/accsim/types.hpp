#pragma once

#include <cmath>
#include <cstdint>

#include "accsim/gain_schedule.hpp"

namespace accsim {

/// Longitudinal point-mass state of one vehicle.
struct VehicleState {
  double x = 0.0;  // position along the lane [m]
  double v = 0.0;  // speed [m/s], never negative
  double a = 0.0;  // realized acceleration over the next tick [m/s^2]

  friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

/// Clock setup for the two-rate loop. The planner runs every plan_dt, the
/// low-level controller every control_dt; plan_dt must be an integer
/// multiple of control_dt. The planning horizon is discretized at
/// horizon_dt over mpc_horizon seconds.
struct TimingConfig {
  double plan_dt = 0.05;     // planner period [s] (20 Hz)
  double control_dt = 0.01;  // controller period [s] (100 Hz)
  double horizon_dt = 0.2;   // horizon discretization [s]
  double mpc_horizon = 2.0;  // horizon length [s]
  double duration = 60.0;    // simulated time [s]

  int control_steps_per_plan() const {
    return static_cast<int>(std::lround(plan_dt / control_dt));
  }
  int horizon_steps() const {
    return static_cast<int>(std::lround(mpc_horizon / horizon_dt));
  }
  int total_ticks() const {
    return static_cast<int>(std::lround(duration / control_dt));
  }

  friend bool operator==(const TimingConfig&, const TimingConfig&) = default;
};

enum class AntiWindupMode {
  kNone,    // integrate unconditionally
  kClamp,   // clamp the accumulated integral to [-limit, +limit]
  kFreeze,  // stop integrating while the controller output is saturated
};

struct AntiWindup {
  AntiWindupMode mode = AntiWindupMode::kNone;
  double limit = 0.0;  // used by kClamp only

  friend bool operator==(const AntiWindup&, const AntiWindup&) = default;
};

/// Low-level speed-tracking controller gains and shaping knobs.
struct ControllerConfig {
  GainSchedule kp{1.0};
  GainSchedule ki{0.0};
  GainSchedule kf{0.0};          // feedforward on a_pid (PIF mode)
  double a_max = 1.5;            // internal setpoint ramp limit, up [m/s^2]
  double a_min = -3.5;           // internal setpoint ramp limit, down [m/s^2]
  double overshoot_allowance = 2.0;  // snap-back band around v_ego [m/s]
  double deadzone = 0.0;         // zero the speed error inside +/- this [m/s]
  AntiWindup antiwindup{};

  friend bool operator==(const ControllerConfig&, const ControllerConfig&) = default;
};

/// Static actuator map between controller output and realized acceleration.
struct ActuatorModel {
  GainSchedule cmd_scale{3.0};  // control units per unit gas/brake command
  double resp_scale = 3.0;      // realized m/s^2 per unit gas/brake command
  double lag_tau = 0.0;         // first-order response lag [s], 0 disables

  friend bool operator==(const ActuatorModel&, const ActuatorModel&) = default;
};

/// Measurement-noise setup. Noise perturbs each follower's view of its
/// predecessor (position and speed); the simulation state stays exact.
struct NoiseConfig {
  bool enabled = false;
  double position_var = 0.25;  // variance of position noise [m^2]
  double speed_var = 0.04;     // variance of speed noise [(m/s)^2]
  std::uint64_t seed = 0;

  friend bool operator==(const NoiseConfig&, const NoiseConfig&) = default;
};

}  // namespace accsim

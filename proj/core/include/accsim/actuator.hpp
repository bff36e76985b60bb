#pragma once

#include "accsim/types.hpp"

namespace accsim {

/// Normalized gas/brake command from a raw controller output. The output
/// is divided by the speed-indexed command scale and clamped to [-1, 1].
double compute_gb(double control, const ActuatorModel& model, double v_ego);

/// Realized acceleration for a normalized gas/brake command.
double gb2accel(double gb, const ActuatorModel& model);

enum class ActuatorResponse { kUndershooting, kMatched, kOvershooting };

/// Classify the loop gain introduced by the actuator pair: the realized
/// acceleration per unit of requested acceleration is resp_scale/cmd_scale
/// (evaluated at v_ego for scheduled command scales).
ActuatorResponse classify_actuator(const ActuatorModel& model, double v_ego = 0.0,
                                   double tolerance = 1e-9);

/// First-order response lag, disabled when tau <= 0.
struct ActuatorLag {
  double a_real = 0.0;

  double step(double a_cmd, double tau, double dt) {
    if (tau <= 0.0) {
      a_real = a_cmd;
    } else {
      a_real += (dt / tau) * (a_cmd - a_real);
    }
    return a_real;
  }
};

}  // namespace accsim

#include "accsim/actuator.hpp"

#include <algorithm>
#include <cmath>

namespace accsim {

double compute_gb(double control, const ActuatorModel& model, double v_ego) {
  const double scale = model.cmd_scale(v_ego);
  return std::clamp(control / scale, -1.0, 1.0);
}

double gb2accel(double gb, const ActuatorModel& model) {
  return model.resp_scale * gb;
}

ActuatorResponse classify_actuator(const ActuatorModel& model, double v_ego,
                                   double tolerance) {
  const double ratio = model.resp_scale / model.cmd_scale(v_ego);
  if (std::abs(ratio - 1.0) <= tolerance) return ActuatorResponse::kMatched;
  return ratio > 1.0 ? ActuatorResponse::kOvershooting
                     : ActuatorResponse::kUndershooting;
}

}  // namespace accsim

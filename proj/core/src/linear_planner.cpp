#include "accsim/linear_planner.hpp"

#include <algorithm>

namespace accsim {

double desired_spacing(const LinearPlannerParams& p, double v_lead, double v_ego) {
  return p.jam_spacing + p.headway * (p.cth_on_ego ? v_ego : v_lead);
}

double plan_target_speed(const LinearPlannerParams& p, double s_lead,
                         double v_lead, double v_ego, double prev_v_target,
                         double plan_dt) {
  const double s_des = desired_spacing(p, v_lead, v_ego);
  double v_target = (s_lead - s_des) * p.k_v(v_ego) + v_lead;
  v_target = std::max(0.0, v_target);
  // Ramp-limit against the previous target so the plan respects the
  // comfort acceleration envelope.
  const double hi = prev_v_target + p.a_max_plan * plan_dt;
  const double lo = prev_v_target + p.a_min_plan * plan_dt;
  v_target = std::clamp(v_target, lo, hi);
  return std::max(0.0, v_target);
}

}  // namespace accsim

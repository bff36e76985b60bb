#pragma once

#include "accsim/gain_schedule.hpp"

namespace accsim {

/// Constant-time-headway planner parameters.
struct LinearPlannerParams {
  double jam_spacing = 2.0;   // standstill gap [m]
  double headway = 1.5;       // time headway [s]
  GainSchedule k_v{0.5};      // spacing-error feedback gain [1/s]
  double a_max_plan = 1.5;    // per-plan-step ramp limit on v_target, up [m/s^2]
  double a_min_plan = -3.5;   // per-plan-step ramp limit on v_target, down [m/s^2]
  bool cth_on_ego = false;    // headway term uses v_ego instead of v_lead

  friend bool operator==(const LinearPlannerParams&, const LinearPlannerParams&) = default;
};

/// Desired gap: jam spacing plus the constant-time-headway term. The
/// headway multiplies the lead speed by default, or the ego speed when
/// cth_on_ego is set.
double desired_spacing(const LinearPlannerParams& p, double v_lead, double v_ego);

/// One planner update: spacing-error feedback around the lead speed,
/// clamped non-negative and ramp-limited against the previous target.
double plan_target_speed(const LinearPlannerParams& p, double s_lead,
                         double v_lead, double v_ego, double prev_v_target,
                         double plan_dt);

}  // namespace accsim

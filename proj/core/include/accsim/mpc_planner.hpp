#pragma once

#include <span>
#include <vector>

#include "accsim/types.hpp"

namespace accsim {

struct MpcWeights {
  double ttc = 5.0;
  double dist = 0.1;
  double accel = 10.0;
  double jerk = 20.0;

  friend bool operator==(const MpcWeights&, const MpcWeights&) = default;
};

struct MpcSolverParams {
  int max_iterations = 60;
  double step_size = 1.0;   // initial gradient step length
  double tolerance = 1e-8;  // relative cost-decrease stopping threshold

  friend bool operator==(const MpcSolverParams&, const MpcSolverParams&) = default;
};

/// Horizon-planner parameters. Horizon geometry (step length and count)
/// lives in TimingConfig so the whole simulation shares one clock setup.
struct MpcParams {
  double headway = 1.5;   // time headway in the desired-spacing law [s]
  double tau = 1.5;       // lead-acceleration decay rate
  double gravity = 9.81;  // braking-distance constant [m/s^2]
  double a_min = -3.5;    // hard bounds on planned acceleration [m/s^2]
  double a_max = 1.5;
  // Spacing error is saturated at +/- this before entering the solver's
  // squared distance residual, so a lead far ahead is a stationary region
  // instead of an attractor.
  double dist_cap = 20.0;
  // Bound on the finite-difference lead-acceleration estimate fed into
  // the horizon prediction (guards step profiles and noisy measurements).
  double lead_accel_clamp = 10.0;
  MpcWeights weights{};
  MpcSolverParams solver{};

  friend bool operator==(const MpcParams&, const MpcParams&) = default;
};

/// Predicted lead trajectory; entry k holds the state after k+1 horizon
/// steps with the lead's acceleration decaying as a0*exp(-tau*t^2/2).
struct LeadPrediction {
  std::vector<double> x, v, a;
};

LeadPrediction predict_lead(const VehicleState& lead, const MpcParams& p,
                            double horizon_dt, int steps);

/// Desired gap for the horizon cost: ego-speed headway term, a
/// relative-speed headway correction, and the braking-distance difference.
/// Can be negative when the lead is much faster; it only feeds cost terms.
double mpc_desired_spacing(double v_ego, double v_lead, const MpcParams& p);

/// The four per-stage penalty features before weighting. `dist` is the
/// uncapped signed value used by stage_cost; the solver caps it separately.
struct StageFeatures {
  double ttc = 0.0;
  double dist = 0.0;
  double accel = 0.0;
  double jerk = 0.0;
};

StageFeatures stage_features(double s_lead, double s_des, double v_ego,
                             double a_ego, double jerk);

/// Weighted linear sum of the four sub-costs at one horizon stage (the
/// reporting/diagnostic form; the solver minimizes the squared residuals).
double stage_cost(int k, const VehicleState& ego, double jerk, double s_lead,
                  double s_des, const MpcParams& p);

/// Least-squares objective of a candidate acceleration plan over the
/// rolled-out horizon: sum over stages of w_i * h_i^2.
double plan_cost(const VehicleState& ego, const LeadPrediction& lead,
                 std::span<const double> plan, double prev_a_target,
                 const MpcParams& p, double horizon_dt);

/// Analytic gradient of plan_cost with respect to the plan entries.
void plan_cost_gradient(const VehicleState& ego, const LeadPrediction& lead,
                        std::span<const double> plan, double prev_a_target,
                        const MpcParams& p, double horizon_dt,
                        std::span<double> grad);

struct MpcSolveResult {
  std::vector<double> plan;   // accelerations over the horizon [m/s^2]
  double a_target = 0.0;      // plan.front()
  int iterations = 0;
  bool converged = true;
  double initial_cost = 0.0;  // cost of the (shifted, projected) warm start
  double final_cost = 0.0;
};

/// Projected-gradient solve over the acceleration sequence. prev_plan is
/// the previous solution (zeros on the first call); it is shifted by one
/// step and projected into [a_min, a_max] as the warm start. prev_a_target
/// is the previously applied target, the jerk predecessor of plan[0].
MpcSolveResult solve_mpc(const VehicleState& ego, const VehicleState& lead,
                         std::span<const double> prev_plan,
                         double prev_a_target, const MpcParams& p,
                         const TimingConfig& timing);

/// Anchors for the between-plans setpoint interpolation (PIF pipeline).
struct StartState {
  double v_start = 0.0;
  double a_start = 0.0;

  friend bool operator==(const StartState&, const StartState&) = default;
};

/// One plan-tick update of the anchors: a_start moves a fraction
/// plan_dt/horizon_dt toward a_target, then v_start integrates the
/// trapezoid of (a_target, new a_start) over plan_dt.
StartState update_start_states(const StartState& s, double a_target,
                               const TimingConfig& timing);

}  // namespace accsim

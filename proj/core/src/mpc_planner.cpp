#include "accsim/mpc_planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace accsim {
namespace {

constexpr double kExpArgCap = 50.0;  // overflow guard on the TTC exponential

double speed_weight(double v) { return 0.1 * v + 1.0; }
double ttc_scale(double v) { return (std::sqrt(v + 0.5) + 0.1) / 0.3; }
double dist_scale(double v) { return 0.05 * v + 0.5; }

// Rolled-out stage quantities kept for the backward pass.
struct StageRecord {
  double v_post = 0.0;   // ego speed after the stage's integration step
  double err = 0.0;      // s_des - s_lead (uncapped)
  double z = 0.0;        // TTC exponential argument (after cap)
  bool z_capped = false;
  bool err_capped = false;
  double h_ttc = 0.0;
  double h_dist = 0.0;
  double h_acc = 0.0;
  double h_jrk = 0.0;
  double jerk = 0.0;
  bool v_clamped = false;  // rolled-out speed hit the v >= 0 clamp
};

// Forward rollout shared by cost and gradient. Returns the least-squares
// objective and fills the per-stage records.
double rollout(const VehicleState& ego, const LeadPrediction& lead,
               std::span<const double> plan, double prev_a_target,
               const MpcParams& p, double dt, std::vector<StageRecord>& rec) {
  const std::size_t n = plan.size();
  rec.assign(n, {});
  double cost = 0.0;
  double xe = ego.x;
  double ve = ego.v;
  double a_prev = prev_a_target;
  for (std::size_t k = 0; k < n; ++k) {
    StageRecord& r = rec[k];
    xe += ve * dt;
    const double v_raw = ve + plan[k] * dt;
    r.v_clamped = v_raw < 0.0;
    ve = std::max(0.0, v_raw);
    r.v_post = ve;
    r.jerk = (plan[k] - a_prev) / dt;
    a_prev = plan[k];

    const double s_lead = lead.x[k] - xe;
    const double s_des = mpc_desired_spacing(ve, lead.v[k], p);
    r.err = s_des - s_lead;
    const double z_raw = r.err / ttc_scale(ve);
    r.z_capped = z_raw > kExpArgCap;
    r.z = std::min(z_raw, kExpArgCap);
    r.h_ttc = std::exp(r.z) - 1.0;
    r.err_capped = std::abs(r.err) > p.dist_cap;
    const double err_c = std::clamp(r.err, -p.dist_cap, p.dist_cap);
    r.h_dist = err_c / dist_scale(ve);
    r.h_acc = plan[k] * speed_weight(ve);
    r.h_jrk = r.jerk * speed_weight(ve);

    cost += p.weights.ttc * r.h_ttc * r.h_ttc +
            p.weights.dist * r.h_dist * r.h_dist +
            p.weights.accel * r.h_acc * r.h_acc +
            p.weights.jerk * r.h_jrk * r.h_jrk;
  }
  return cost;
}

}  // namespace

LeadPrediction predict_lead(const VehicleState& lead, const MpcParams& p,
                            double horizon_dt, int steps) {
  LeadPrediction out;
  out.x.reserve(steps);
  out.v.reserve(steps);
  out.a.reserve(steps);
  const double a0 = lead.a;
  double x = lead.x;
  double v = lead.v;
  double t_hat = 0.0;
  for (int k = 0; k < steps; ++k) {
    const double a = a0 * std::exp(-p.tau * t_hat * t_hat / 2.0);
    x += v * horizon_dt;
    v = std::max(0.0, v + a * horizon_dt);
    t_hat += horizon_dt;
    out.x.push_back(x);
    out.v.push_back(v);
    out.a.push_back(a);
  }
  return out;
}

double mpc_desired_spacing(double v_ego, double v_lead, const MpcParams& p) {
  return v_ego * p.headway - (v_lead - v_ego) * p.headway +
         (v_ego * v_ego - v_lead * v_lead) / (2.0 * p.gravity);
}

StageFeatures stage_features(double s_lead, double s_des, double v_ego,
                             double a_ego, double jerk) {
  StageFeatures f;
  const double z = std::min((s_des - s_lead) / ttc_scale(v_ego), kExpArgCap);
  f.ttc = std::exp(z) - 1.0;
  f.dist = (s_des - s_lead) / dist_scale(v_ego);
  f.accel = a_ego * speed_weight(v_ego);
  f.jerk = jerk * speed_weight(v_ego);
  return f;
}

double stage_cost(int /*k*/, const VehicleState& ego, double jerk,
                  double s_lead, double s_des, const MpcParams& p) {
  const StageFeatures f = stage_features(s_lead, s_des, ego.v, ego.a, jerk);
  return p.weights.ttc * f.ttc + p.weights.dist * f.dist +
         p.weights.accel * f.accel + p.weights.jerk * f.jerk;
}

double plan_cost(const VehicleState& ego, const LeadPrediction& lead,
                 std::span<const double> plan, double prev_a_target,
                 const MpcParams& p, double horizon_dt) {
  std::vector<StageRecord> rec;
  return rollout(ego, lead, plan, prev_a_target, p, horizon_dt, rec);
}

void plan_cost_gradient(const VehicleState& ego, const LeadPrediction& lead,
                        std::span<const double> plan, double prev_a_target,
                        const MpcParams& p, double horizon_dt,
                        std::span<double> grad) {
  const std::size_t n = plan.size();
  if (grad.size() != n) {
    throw std::invalid_argument("gradient span size must match plan size");
  }
  const double dt = horizon_dt;
  std::vector<StageRecord> rec;
  rollout(ego, lead, plan, prev_a_target, p, dt, rec);

  // Per-stage partial derivatives of the stage cost with respect to the
  // post-step ego position/speed and the stage acceleration.
  std::vector<double> gx(n, 0.0), gv(n, 0.0), ga(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const StageRecord& r = rec[k];
    const double v = r.v_post;
    const double sw = speed_weight(v);
    const double sig = ttc_scale(v);
    const double dsc = dist_scale(v);
    // d s_des / d v_ego: two headway terms plus the kinetic term.
    const double dsdes_dv = 2.0 * p.headway + v / p.gravity;
    const double exp_z = r.z_capped ? 0.0 : std::exp(r.z);
    const double dsig_dv = 1.0 / (0.6 * std::sqrt(v + 0.5));

    const double c_ttc = 2.0 * p.weights.ttc * r.h_ttc * exp_z;
    const double c_dist = 2.0 * p.weights.dist * r.h_dist;
    const double c_acc = 2.0 * p.weights.accel * r.h_acc;
    const double c_jrk = 2.0 * p.weights.jerk * r.h_jrk;
    const double derr_pass = r.err_capped ? 0.0 : 1.0;

    // err = s_des - s_lead grows one-for-one with the ego position.
    gx[k] = c_ttc / sig + c_dist * derr_pass / dsc;
    gv[k] = c_ttc * (dsdes_dv / sig - r.err * dsig_dv / (sig * sig)) +
            c_dist * (derr_pass * dsdes_dv / dsc - r.h_dist * 0.05 / dsc) +
            c_acc * 0.1 * plan[k] + c_jrk * 0.1 * r.jerk;
    ga[k] = c_acc * sw + c_jrk * sw / dt;
    if (k + 1 < n) {
      // The next stage's jerk depends on this stage's acceleration.
      const StageRecord& rn = rec[k + 1];
      ga[k] += -2.0 * p.weights.jerk * rn.h_jrk * speed_weight(rn.v_post) / dt;
    }
  }

  // Adjoint sweep over the dynamics x' = x + v dt, v' = max(0, v + a dt).
  double lam_x = 0.0;  // dJ/dx at the state entering stage k+1
  double lam_v = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    const double pass = rec[k].v_clamped ? 0.0 : 1.0;
    const double lx_post = gx[k] + lam_x;           // dJ/d xe[k+1]
    const double lv_post = gv[k] + lam_v;           // dJ/d ve[k+1]
    grad[k] = ga[k] + lv_post * pass * dt;
    lam_x = lx_post;
    lam_v = lv_post * pass + lx_post * dt;
  }
}

MpcSolveResult solve_mpc(const VehicleState& ego, const VehicleState& lead,
                         std::span<const double> prev_plan,
                         double prev_a_target, const MpcParams& p,
                         const TimingConfig& timing) {
  const int n = timing.horizon_steps();
  if (static_cast<int>(prev_plan.size()) != n) {
    throw std::invalid_argument("prev_plan length must equal horizon steps");
  }
  const double dt = timing.horizon_dt;
  const LeadPrediction pred = predict_lead(lead, p, dt, n);

  // Warm start: previous plan shifted by one step, projected into bounds.
  std::vector<double> plan(prev_plan.begin(), prev_plan.end());
  for (int k = 0; k + 1 < n; ++k) plan[k] = prev_plan[k + 1];
  for (double& a : plan) a = std::clamp(a, p.a_min, p.a_max);

  MpcSolveResult out;
  std::vector<double> grad(n, 0.0), cand(n, 0.0);
  double cost = plan_cost(ego, pred, plan, prev_a_target, p, dt);
  out.initial_cost = cost;
  out.converged = false;

  double step = p.solver.step_size;
  int it = 0;
  while (it < p.solver.max_iterations) {
    ++it;
    plan_cost_gradient(ego, pred, plan, prev_a_target, p, dt, grad);
    double gmax = 0.0;
    for (double g : grad) gmax = std::max(gmax, std::abs(g));
    if (gmax < 1e-12) {
      out.converged = true;
      break;
    }
    // Backtracking line search along the projected gradient direction.
    bool improved = false;
    double cand_cost = cost;
    while (step > 1e-15) {
      for (int k = 0; k < n; ++k) {
        cand[k] = std::clamp(plan[k] - step * grad[k], p.a_min, p.a_max);
      }
      cand_cost = plan_cost(ego, pred, cand, prev_a_target, p, dt);
      if (cand_cost < cost) {
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) {
      // No descent direction at numeric resolution: stationary point
      // (typically the projected box boundary or the cost floor).
      out.converged = true;
      break;
    }
    const double drop = (cost - cand_cost) / std::max(1.0, cost);
    plan.swap(cand);
    cost = cand_cost;
    if (drop < p.solver.tolerance) {
      out.converged = true;
      break;
    }
    step = std::min(step * 2.0, 8.0 * p.solver.step_size);
  }

  out.iterations = it;
  out.final_cost = cost;
  out.plan = std::move(plan);
  out.a_target = out.plan.front();
  return out;
}

StartState update_start_states(const StartState& s, double a_target,
                               const TimingConfig& timing) {
  StartState out = s;
  out.a_start += (timing.plan_dt / timing.horizon_dt) * (a_target - out.a_start);
  out.v_start += timing.plan_dt * (a_target + out.a_start) / 2.0;
  return out;
}

}  // namespace accsim

#include "accsim/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "accsim/actuator.hpp"
#include "accsim/lowlevel.hpp"
#include "accsim/noise.hpp"

namespace accsim {
namespace {

// Mutable per-follower loop state.
struct Follower {
  const VehicleSpec* spec = nullptr;
  VehicleState st{};
  PidState pid{};
  ActuatorLag lag{};
  // Linear pipeline.
  double v_target = 0.0;
  // MPC pipeline.
  std::vector<double> prev_plan;
  double a_target = 0.0;
  double prev_a_target = 0.0;
  StartState start{};
  double plan_time = 0.0;
  // Predecessor measurement memory for the lead-acceleration estimate.
  bool has_prev_meas = false;
  double prev_meas_v = 0.0;
  GaussianStream pos_noise{};
  GaussianStream vel_noise{};
};

bool finite(double v) { return std::isfinite(v); }

}  // namespace

PlatoonTrace run_platoon(const Scenario& raw) {
  const Scenario s = validate_scenario(raw);
  const TimingConfig& T = s.timing;
  const double dt = T.control_dt;
  const int steps_per_plan = T.control_steps_per_plan();
  const int n_follow = static_cast<int>(s.vehicles.size());

  PlatoonTrace trace;
  trace.timing = T;
  trace.vehicle_count = n_follow + 1;

  VehicleState lead;
  lead.x = 0.0;
  lead.v = s.lead_initial_speed;

  std::vector<Follower> fleet(n_follow);
  for (int i = 0; i < n_follow; ++i) {
    Follower& f = fleet[i];
    f.spec = &s.vehicles[i];
    const double x_pred = (i == 0) ? lead.x : fleet[i - 1].st.x;
    f.st.v = *f.spec->initial_speed;
    f.st.x = x_pred - *f.spec->initial_spacing;
    f.pid.v_pid = f.st.v;  // engage at the current speed
    f.v_target = f.st.v;
    f.start = StartState{f.st.v, f.st.a};
    f.prev_plan.assign(T.horizon_steps(), 0.0);
    f.pos_noise = GaussianStream(s.noise.seed, static_cast<std::uint64_t>(i) * 2);
    f.vel_noise = GaussianStream(s.noise.seed, static_cast<std::uint64_t>(i) * 2 + 1);
  }

  const int total_ticks = T.total_ticks();
  trace.records.reserve(static_cast<std::size_t>(total_ticks) * trace.vehicle_count);

  for (int tick = 0; tick < total_ticks; ++tick) {
    const double t = tick * dt;
    bool bad_value = false;

    // Plan tick: every follower samples its predecessor and replans.
    if (tick % steps_per_plan == 0) {
      for (int i = 0; i < n_follow; ++i) {
        Follower& f = fleet[i];
        const VehicleState& pred = (i == 0) ? lead : fleet[i - 1].st;
        const double meas_x = apply_measurement_noise(pred.x, s.noise.position_var,
                                                      s.noise.enabled, f.pos_noise);
        const double meas_v = std::max(
            0.0, apply_measurement_noise(pred.v, s.noise.speed_var, s.noise.enabled,
                                         f.vel_noise));
        if (const auto* lin = std::get_if<LinearPlannerParams>(&f.spec->planner)) {
          const double s_lead = meas_x - f.st.x;
          f.v_target = plan_target_speed(*lin, s_lead, meas_v, f.st.v, f.v_target,
                                         T.plan_dt);
        } else {
          const MpcParams& mp = std::get<MpcParams>(f.spec->planner);
          double a_est = f.has_prev_meas ? (meas_v - f.prev_meas_v) / T.plan_dt : 0.0;
          a_est = std::clamp(a_est, -mp.lead_accel_clamp, mp.lead_accel_clamp);
          const VehicleState lead_meas{meas_x, meas_v, a_est};
          const MpcSolveResult res =
              solve_mpc(f.st, lead_meas, f.prev_plan, f.prev_a_target, mp, T);
          f.prev_plan = res.plan;
          f.a_target = res.a_target;
          f.prev_a_target = res.a_target;
          f.start = update_start_states(f.start, f.a_target, T);
          f.plan_time = t;
          trace.solves.push_back(SolveDiag{t, i + 1, res.iterations, res.converged,
                                           res.final_cost <= res.initial_cost,
                                           res.initial_cost, res.final_cost});
        }
        f.has_prev_meas = true;
        f.prev_meas_v = meas_v;
      }
    }

    // Lead row: acceleration is whatever the profile applies over the
    // coming tick, so integration semantics match the followers'.
    const double lead_v_next =
        std::max(0.0, s.lead_profile.speed_at(t + dt, s.lead_initial_speed));
    lead.a = (lead_v_next - lead.v) / dt;
    TickRecord lead_row;
    lead_row.t = t;
    lead_row.vehicle = 0;
    lead_row.state = lead;
    trace.records.push_back(lead_row);

    // Control tick for every follower.
    for (int i = 0; i < n_follow; ++i) {
      Follower& f = fleet[i];
      const ControllerConfig& c = f.spec->controller;
      TickRecord row;
      row.t = t;
      row.vehicle = i + 1;
      if (f.spec->uses_mpc()) {
        step_setpoints_mpc(f.pid, f.start, f.a_target, f.plan_time, t, T);
        row.a_target = f.a_target;
        row.a_pid = f.pid.a_pid;
      } else {
        step_vpid_linear(f.pid, f.v_target, f.st.v, c, dt);
        row.v_target = f.v_target;
      }
      const ControlTerms terms = pif_control(f.pid, f.st.v, c, dt);
      const double gb = compute_gb(terms.control, f.spec->actuator, f.st.v);
      const double a_cmd = gb2accel(gb, f.spec->actuator);
      f.st.a = f.lag.step(a_cmd, f.spec->actuator.lag_tau, dt);

      row.v_pid = f.pid.v_pid;
      row.p_term = terms.p;
      row.i_term = terms.i;
      row.f_term = terms.f;
      row.control = terms.control;
      row.gb = gb;
      row.state = f.st;
      trace.records.push_back(row);
      if (!finite(terms.control) || !finite(f.st.a)) bad_value = true;
    }

    // Integrate: new speed first (clamped), then position with the new
    // speed, for lead and followers alike.
    lead.v = lead_v_next;
    lead.x += lead.v * dt;
    if (!finite(lead.x) || !finite(lead.v)) bad_value = true;
    bool collided = false;
    for (int i = 0; i < n_follow; ++i) {
      Follower& f = fleet[i];
      f.st.v = std::max(0.0, f.st.v + f.st.a * dt);
      f.st.x += f.st.v * dt;
      if (!finite(f.st.x) || !finite(f.st.v)) bad_value = true;
    }
    for (int i = 0; i < n_follow && !bad_value; ++i) {
      const double x_pred = (i == 0) ? lead.x : fleet[i - 1].st.x;
      if (x_pred - fleet[i].st.x <= 0.0) {
        collided = true;
        break;
      }
    }

    if (bad_value) {
      trace.status = RunStatus::kNan;
      trace.fail_tick = tick;
      break;
    }
    if (collided) {
      trace.status = RunStatus::kCollision;
      trace.fail_tick = tick;
      break;
    }
  }
  return trace;
}

}  // namespace accsim

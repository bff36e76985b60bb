#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "accsim/scenario.hpp"
#include "accsim/sim_engine.hpp"
#include "accsim/trace.hpp"

using namespace accsim;

namespace {

VehicleSpec linear_follower(double kp, double ki, double resp_scale,
                            double cmd_scale) {
  VehicleSpec v;
  v.planner = LinearPlannerParams{};
  v.controller.kp = GainSchedule(kp);
  v.controller.ki = GainSchedule(ki);
  if (ki > 0.0) {
    v.controller.antiwindup.mode = AntiWindupMode::kClamp;
    v.controller.antiwindup.limit = v.controller.a_max / ki;
  }
  v.actuator.cmd_scale = GainSchedule(cmd_scale);
  v.actuator.resp_scale = resp_scale;
  return v;
}

VehicleSpec mpc_follower(double kp, double kf) {
  VehicleSpec v;
  v.planner = MpcParams{};
  v.controller.kp = GainSchedule(kp);
  v.controller.kf = GainSchedule(kf);
  return v;
}

Scenario step_scenario(int followers, double step_delta, double step_time) {
  Scenario sc;
  sc.timing.duration = 60.0;
  sc.lead_initial_speed = 20.0;
  sc.lead_profile.kind = LeadProfileKind::kStep;
  sc.lead_profile.step_time = step_time;
  sc.lead_profile.step_delta = step_delta;
  for (int i = 0; i < followers; ++i)
    sc.vehicles.push_back(linear_follower(1.0, 0.33, 3.0, 3.0));
  return sc;
}

double excursion(const PlatoonTrace& tr, int vehicle) {
  double lo = tr.at(0, vehicle).state.v;
  double hi = lo;
  for (int t = 0; t < tr.tick_count(); ++t) {
    const double v = tr.at(t, vehicle).state.v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo;
}

double min_speed(const PlatoonTrace& tr, int vehicle) {
  double lo = tr.at(0, vehicle).state.v;
  for (int t = 0; t < tr.tick_count(); ++t)
    lo = std::min(lo, tr.at(t, vehicle).state.v);
  return lo;
}

}  // namespace

TEST_CASE("linear follower at equilibrium holds speed and spacing") {
  Scenario sc;
  sc.timing.duration = 60.0;
  sc.lead_initial_speed = 20.0;
  sc.vehicles.push_back(linear_follower(1.0, 0.0, 3.0, 3.0));

  const PlatoonTrace tr = run_platoon(sc);
  REQUIRE(tr.status == RunStatus::kOk);
  REQUIRE(tr.tick_count() == 6000);

  for (int t = 0; t < tr.tick_count(); ++t) {
    CHECK(std::abs(tr.at(t, 1).state.v - 20.0) < 1e-6);
    const double spacing = tr.at(t, 0).state.x - tr.at(t, 1).state.x;
    CHECK(std::abs(spacing - 32.0) < 1e-6);
  }
}

TEST_CASE("mpc follower at equilibrium holds speed and spacing") {
  Scenario sc;
  sc.timing.duration = 60.0;
  sc.lead_initial_speed = 20.0;
  sc.vehicles.push_back(mpc_follower(1.0, 1.0));

  const PlatoonTrace tr = run_platoon(sc);
  REQUIRE(tr.status == RunStatus::kOk);

  for (int t = 0; t < tr.tick_count(); ++t) {
    CHECK(std::abs(tr.at(t, 1).state.v - 20.0) < 1e-6);
    const double spacing = tr.at(t, 0).state.x - tr.at(t, 1).state.x;
    CHECK(std::abs(spacing - 30.0) < 1e-6);
  }
}

TEST_CASE("same scenario and seed reproduce a bit-identical trace") {
  Scenario sc = step_scenario(2, -5.0, 10.0);
  sc.noise.enabled = true;
  sc.noise.seed = 7;

  const PlatoonTrace a = run_platoon(sc);
  const PlatoonTrace b = run_platoon(sc);
  CHECK(a.records == b.records);
  CHECK(a.solves == b.solves);
  CHECK(a.status == b.status);

  std::ostringstream csv_a, csv_b;
  write_trace_csv(a, csv_a);
  write_trace_csv(b, csv_b);
  CHECK(csv_a.str() == csv_b.str());
}

TEST_CASE("a different noise seed changes the trace") {
  Scenario sc = step_scenario(1, -5.0, 10.0);
  sc.timing.duration = 20.0;
  sc.noise.enabled = true;

  sc.noise.seed = 1;
  const PlatoonTrace a = run_platoon(sc);
  sc.noise.seed = 2;
  const PlatoonTrace b = run_platoon(sc);
  CHECK(a.records != b.records);
}

TEST_CASE("position is the exact running sum of speed over ticks") {
  Scenario sc = step_scenario(2, -5.0, 10.0);
  sc.noise.enabled = true;
  sc.noise.seed = 3;
  sc.timing.duration = 30.0;

  const PlatoonTrace tr = run_platoon(sc);
  REQUIRE(tr.status == RunStatus::kOk);
  const double dt = tr.timing.control_dt;
  const int last = tr.tick_count() - 1;
  for (int veh = 0; veh < tr.vehicle_count; ++veh) {
    double xx = tr.at(0, veh).state.x;
    for (int t = 1; t <= last; ++t) xx += tr.at(t, veh).state.v * dt;
    CHECK(xx == tr.at(last, veh).state.x);
  }
}

TEST_CASE("linear target speed only changes on planner ticks") {
  Scenario sc = step_scenario(1, -5.0, 10.0);
  sc.timing.duration = 20.0;

  const PlatoonTrace tr = run_platoon(sc);
  const int spp = tr.timing.control_steps_per_plan();
  REQUIRE(spp == 5);

  int plan_changes = 0;
  for (int t = 1; t < tr.tick_count(); ++t) {
    const auto& cur = tr.at(t, 1);
    const auto& prev = tr.at(t - 1, 1);
    REQUIRE(cur.v_target.has_value());
    if (t % spp != 0) {
      CHECK(*cur.v_target == *prev.v_target);
    } else if (*cur.v_target != *prev.v_target) {
      ++plan_changes;
    }
  }
  CHECK(plan_changes > 10);

  // lead rows carry state only
  for (int t = 0; t < tr.tick_count(); t += 97) {
    const auto& lead = tr.at(t, 0);
    CHECK_FALSE(lead.v_target.has_value());
    CHECK_FALSE(lead.v_pid.has_value());
    CHECK_FALSE(lead.control.has_value());
    CHECK_FALSE(lead.gb.has_value());
  }
}

TEST_CASE("mpc target accel holds between planner ticks while setpoints move") {
  Scenario sc;
  sc.timing.duration = 20.0;
  sc.lead_initial_speed = 20.0;
  sc.lead_profile.kind = LeadProfileKind::kStep;
  sc.lead_profile.step_time = 5.0;
  sc.lead_profile.step_delta = -3.0;
  sc.vehicles.push_back(mpc_follower(1.0, 1.0));

  const PlatoonTrace tr = run_platoon(sc);
  REQUIRE(tr.status == RunStatus::kOk);
  const int spp = tr.timing.control_steps_per_plan();

  int setpoint_moves = 0;
  for (int t = 1; t < tr.tick_count(); ++t) {
    const auto& cur = tr.at(t, 1);
    REQUIRE(cur.a_target.has_value());
    REQUIRE(cur.v_pid.has_value());
    REQUIRE(cur.a_pid.has_value());
    CHECK_FALSE(cur.v_target.has_value());
    if (t % spp != 0) {
      CHECK(*cur.a_target == *tr.at(t - 1, 1).a_target);
      if (*cur.v_pid != *tr.at(t - 1, 1).v_pid) ++setpoint_moves;
    }
  }
  CHECK(setpoint_moves > 100);
}

TEST_CASE("mpc solves are logged once per plan tick and cost never increases") {
  Scenario sc;
  sc.timing.duration = 20.0;
  sc.lead_initial_speed = 20.0;
  sc.lead_profile.kind = LeadProfileKind::kStep;
  sc.lead_profile.step_time = 5.0;
  sc.lead_profile.step_delta = -4.0;
  sc.vehicles.push_back(mpc_follower(1.0, 1.0));
  sc.vehicles.push_back(mpc_follower(1.0, 1.0));

  const PlatoonTrace tr = run_platoon(sc);
  REQUIRE(tr.status == RunStatus::kOk);
  const int plan_ticks =
      (tr.tick_count() + tr.timing.control_steps_per_plan() - 1) /
      tr.timing.control_steps_per_plan();
  CHECK(tr.solves.size() == static_cast<std::size_t>(2 * plan_ticks));
  for (const auto& s : tr.solves) {
    CHECK(s.cost_monotone);
    CHECK(s.final_cost <= s.initial_cost);
  }
}

TEST_CASE("matched actuator realizes the commanded accel when unsaturated") {
  Scenario sc = step_scenario(1, -5.0, 10.0);
  sc.timing.duration = 20.0;

  const PlatoonTrace tr = run_platoon(sc);
  for (int t = 0; t < tr.tick_count(); ++t) {
    const auto& r = tr.at(t, 1);
    REQUIRE(r.control.has_value());
    REQUIRE(r.gb.has_value());
    CHECK(r.state.a == 3.0 * *r.gb);
    if (std::abs(*r.control) <= 3.0)
      CHECK(r.state.a == doctest::Approx(*r.control).epsilon(1e-12));
    else
      CHECK(std::abs(r.state.a) == doctest::Approx(3.0));
  }
}

TEST_CASE("well-damped platoon attenuates a brake step down the string") {
  Scenario sc;
  sc.timing.duration = 60.0;
  sc.lead_initial_speed = 20.0;
  sc.lead_profile.kind = LeadProfileKind::kStep;
  sc.lead_profile.step_time = 10.0;
  sc.lead_profile.step_delta = -5.0;
  for (int i = 0; i < 5; ++i)
    sc.vehicles.push_back(linear_follower(2.0, 0.0, 3.0, 3.0));

  const PlatoonTrace tr = run_platoon(sc);
  REQUIRE(tr.status == RunStatus::kOk);
  for (int veh = 1; veh <= 5; ++veh) {
    CHECK(min_speed(tr, veh) >= min_speed(tr, veh - 1) - 1e-6);
    const int last = tr.tick_count() - 1;
    CHECK(tr.at(last, veh).state.v == doctest::Approx(15.0).epsilon(1e-3));
  }
}

TEST_CASE("weak actuator response amplifies the excursion down the string") {
  Scenario sc;
  sc.timing.duration = 60.0;
  sc.lead_initial_speed = 20.0;
  sc.lead_profile.kind = LeadProfileKind::kStep;
  sc.lead_profile.step_time = 10.0;
  sc.lead_profile.step_delta = -5.0;
  for (int i = 0; i < 5; ++i)
    sc.vehicles.push_back(linear_follower(1.0, 0.33, 1.8, 3.0));

  const PlatoonTrace tr = run_platoon(sc);
  REQUIRE(tr.status == RunStatus::kOk);
  bool amplified = false;
  for (int veh = 1; veh <= 5; ++veh)
    if (excursion(tr, veh) > excursion(tr, veh - 1) + 1e-6) amplified = true;
  CHECK(amplified);
}

TEST_CASE("a closing platoon ends in a collision with a truncated trace") {
  Scenario sc;
  sc.timing.duration = 60.0;
  sc.lead_initial_speed = 10.0;
  VehicleSpec v = linear_follower(0.2, 0.0, 3.0, 3.0);
  v.initial_spacing = 5.0;
  v.initial_speed = 30.0;
  sc.vehicles.push_back(v);

  const PlatoonTrace tr = run_platoon(sc);
  CHECK(tr.status == RunStatus::kCollision);
  REQUIRE(tr.fail_tick >= 0);
  CHECK(tr.tick_count() == tr.fail_tick + 1);
  CHECK(tr.fail_tick < tr.timing.total_ticks() - 1);

  // replay one integration step from the last recorded tick: the pair meets
  const double dt = tr.timing.control_dt;
  const auto& lead = tr.at(tr.fail_tick, 0);
  const auto& ego = tr.at(tr.fail_tick, 1);
  const double lead_v = std::max(0.0, lead.state.v + lead.state.a * dt);
  const double ego_v = std::max(0.0, ego.state.v + ego.state.a * dt);
  const double next_spacing =
      (lead.state.x + lead_v * dt) - (ego.state.x + ego_v * dt);
  CHECK(next_spacing <= 0.0);
}

TEST_CASE("runaway lead state aborts the run with a nan status") {
  Scenario sc;
  sc.timing.duration = 200.0;
  sc.lead_initial_speed = 20.0;
  sc.lead_profile.kind = LeadProfileKind::kPiecewise;
  sc.lead_profile.points = {{0.0, 20.0}, {1.0, 20.0}, {2.0, 1e306}};
  sc.vehicles.push_back(linear_follower(1.0, 0.0, 3.0, 3.0));

  const PlatoonTrace tr = run_platoon(sc);
  CHECK(tr.status == RunStatus::kNan);
  REQUIRE(tr.fail_tick > 0);
  CHECK(tr.tick_count() == tr.fail_tick + 1);
  for (const auto& r : tr.records) {
    CHECK(std::isfinite(r.state.x));
    CHECK(std::isfinite(r.state.v));
  }
}

#include "accsim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

namespace accsim {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ScenarioError(path + ": " + what);
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (key == k) {
        known = true;
        break;
      }
    }
    if (!known) fail(path + "." + key, "unknown key");
  }
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

double opt_number(const json& j, const char* key, double fallback,
                  const std::string& path) {
  if (!j.contains(key)) return fallback;
  return get_number(j.at(key), path + "." + key);
}

bool opt_bool(const json& j, const char* key, bool fallback,
              const std::string& path) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_boolean()) fail(path + "." + key, "expected a boolean");
  return v.get<bool>();
}

GainSchedule parse_schedule(const json& j, const std::string& path) {
  if (j.is_number()) return GainSchedule(j.get<double>());
  if (j.is_object()) {
    check_keys(j, path, {"breakpoints"});
    if (!j.contains("breakpoints")) fail(path, "schedule object needs breakpoints");
    const json& bp = j.at("breakpoints");
    if (!bp.is_array() || bp.empty()) fail(path + ".breakpoints", "expected a non-empty array");
    std::vector<std::pair<double, double>> points;
    for (std::size_t i = 0; i < bp.size(); ++i) {
      const json& e = bp[i];
      const std::string ep = path + ".breakpoints[" + std::to_string(i) + "]";
      if (!e.is_array() || e.size() != 2) fail(ep, "expected [speed, gain]");
      points.emplace_back(get_number(e[0], ep + "[0]"), get_number(e[1], ep + "[1]"));
    }
    try {
      return GainSchedule(std::move(points));
    } catch (const std::invalid_argument& e) {
      fail(path + ".breakpoints", e.what());
    }
  }
  fail(path, "expected a number or a schedule object");
}

GainSchedule opt_schedule(const json& j, const char* key,
                          const GainSchedule& fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  return parse_schedule(j.at(key), path + "." + key);
}

json schedule_to_json(const GainSchedule& s) {
  if (s.is_constant()) return s.breakpoints().front().second;
  json bp = json::array();
  for (const auto& [v, g] : s.breakpoints()) bp.push_back(json::array({v, g}));
  return json{{"breakpoints", bp}};
}

TimingConfig parse_timing(const json& j, const std::string& path) {
  check_keys(j, path, {"plan_dt", "control_dt", "horizon_dt", "mpc_horizon", "duration"});
  TimingConfig t;
  t.plan_dt = opt_number(j, "plan_dt", t.plan_dt, path);
  t.control_dt = opt_number(j, "control_dt", t.control_dt, path);
  t.horizon_dt = opt_number(j, "horizon_dt", t.horizon_dt, path);
  t.mpc_horizon = opt_number(j, "mpc_horizon", t.mpc_horizon, path);
  t.duration = opt_number(j, "duration", t.duration, path);
  return t;
}

NoiseConfig parse_noise(const json& j, const std::string& path) {
  check_keys(j, path, {"enabled", "position_var", "speed_var", "seed"});
  NoiseConfig n;
  n.enabled = opt_bool(j, "enabled", n.enabled, path);
  n.position_var = opt_number(j, "position_var", n.position_var, path);
  n.speed_var = opt_number(j, "speed_var", n.speed_var, path);
  if (j.contains("seed")) {
    const json& s = j.at("seed");
    if (!s.is_number_integer() && !s.is_number_unsigned()) fail(path + ".seed", "expected an integer");
    n.seed = s.get<std::uint64_t>();
  }
  return n;
}

LeadProfile parse_profile(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("type")) fail(path, "expected an object with a type");
  const std::string type = j.at("type").get<std::string>();
  LeadProfile p;
  if (type == "constant") {
    check_keys(j, path, {"type"});
    p.kind = LeadProfileKind::kConstant;
  } else if (type == "step") {
    check_keys(j, path, {"type", "time", "delta_v"});
    p.kind = LeadProfileKind::kStep;
    p.step_time = opt_number(j, "time", 0.0, path);
    p.step_delta = opt_number(j, "delta_v", 0.0, path);
  } else if (type == "sinusoid") {
    check_keys(j, path, {"type", "amplitude", "omega"});
    p.kind = LeadProfileKind::kSinusoid;
    p.amplitude = opt_number(j, "amplitude", 0.0, path);
    p.omega = opt_number(j, "omega", 1.0, path);
  } else if (type == "piecewise") {
    check_keys(j, path, {"type", "points"});
    p.kind = LeadProfileKind::kPiecewise;
    if (!j.contains("points") || !j.at("points").is_array()) {
      fail(path + ".points", "expected an array of [t, v] pairs");
    }
    const json& pts = j.at("points");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const json& e = pts[i];
      const std::string ep = path + ".points[" + std::to_string(i) + "]";
      if (!e.is_array() || e.size() != 2) fail(ep, "expected [t, v]");
      p.points.emplace_back(get_number(e[0], ep + "[0]"), get_number(e[1], ep + "[1]"));
    }
  } else if (type == "external") {
    check_keys(j, path, {"type", "path"});
    if (!j.contains("path")) fail(path + ".path", "external profile needs a file path");
    p = ingest_external_trace(j.at("path").get<std::string>());
  } else {
    fail(path + ".type", "unknown profile type '" + type + "'");
  }
  return p;
}

json profile_to_json(const LeadProfile& p) {
  switch (p.kind) {
    case LeadProfileKind::kConstant:
      return json{{"type", "constant"}};
    case LeadProfileKind::kStep:
      return json{{"type", "step"}, {"time", p.step_time}, {"delta_v", p.step_delta}};
    case LeadProfileKind::kSinusoid:
      return json{{"type", "sinusoid"}, {"amplitude", p.amplitude}, {"omega", p.omega}};
    case LeadProfileKind::kPiecewise: {
      json pts = json::array();
      for (const auto& [t, v] : p.points) pts.push_back(json::array({t, v}));
      return json{{"type", "piecewise"}, {"points", pts}};
    }
  }
  return {};
}

ControllerConfig parse_controller(const json& j, const std::string& path) {
  check_keys(j, path, {"kp", "ki", "kf", "a_max", "a_min", "overshoot_allowance",
                       "deadzone", "antiwindup"});
  ControllerConfig c;
  c.kp = opt_schedule(j, "kp", c.kp, path);
  c.ki = opt_schedule(j, "ki", c.ki, path);
  c.kf = opt_schedule(j, "kf", c.kf, path);
  c.a_max = opt_number(j, "a_max", c.a_max, path);
  c.a_min = opt_number(j, "a_min", c.a_min, path);
  c.overshoot_allowance = opt_number(j, "overshoot_allowance", c.overshoot_allowance, path);
  c.deadzone = opt_number(j, "deadzone", c.deadzone, path);
  if (j.contains("antiwindup")) {
    const json& aw = j.at("antiwindup");
    const std::string ap = path + ".antiwindup";
    check_keys(aw, ap, {"mode", "limit"});
    const std::string mode = aw.contains("mode") ? aw.at("mode").get<std::string>() : "none";
    if (mode == "none") {
      c.antiwindup.mode = AntiWindupMode::kNone;
    } else if (mode == "clamp") {
      c.antiwindup.mode = AntiWindupMode::kClamp;
    } else if (mode == "freeze") {
      c.antiwindup.mode = AntiWindupMode::kFreeze;
    } else {
      fail(ap + ".mode", "unknown antiwindup mode '" + mode + "'");
    }
    if (aw.contains("limit")) {
      c.antiwindup.limit = get_number(aw.at("limit"), ap + ".limit");
    } else if (c.antiwindup.mode == AntiWindupMode::kClamp) {
      // Default clamp limit: the integral needed to saturate the setpoint
      // ramp, a_max / ki.
      const double ki0 = c.ki(0.0);
      if (ki0 <= 0.0) fail(ap + ".limit", "clamp antiwindup needs an explicit limit when ki is 0");
      c.antiwindup.limit = c.a_max / ki0;
    }
  }
  return c;
}

json controller_to_json(const ControllerConfig& c) {
  json aw;
  switch (c.antiwindup.mode) {
    case AntiWindupMode::kNone: aw = json{{"mode", "none"}}; break;
    case AntiWindupMode::kClamp: aw = json{{"mode", "clamp"}, {"limit", c.antiwindup.limit}}; break;
    case AntiWindupMode::kFreeze: aw = json{{"mode", "freeze"}}; break;
  }
  return json{{"kp", schedule_to_json(c.kp)},   {"ki", schedule_to_json(c.ki)},
              {"kf", schedule_to_json(c.kf)},   {"a_max", c.a_max},
              {"a_min", c.a_min},               {"overshoot_allowance", c.overshoot_allowance},
              {"deadzone", c.deadzone},         {"antiwindup", aw}};
}

ActuatorModel parse_actuator(const json& j, const std::string& path) {
  check_keys(j, path, {"cmd_scale", "resp_scale", "lag_tau"});
  ActuatorModel m;
  m.cmd_scale = opt_schedule(j, "cmd_scale", m.cmd_scale, path);
  m.resp_scale = opt_number(j, "resp_scale", m.resp_scale, path);
  m.lag_tau = opt_number(j, "lag_tau", m.lag_tau, path);
  return m;
}

json actuator_to_json(const ActuatorModel& m) {
  return json{{"cmd_scale", schedule_to_json(m.cmd_scale)},
              {"resp_scale", m.resp_scale},
              {"lag_tau", m.lag_tau}};
}

LinearPlannerParams parse_linear_planner(const json& j, const std::string& path) {
  check_keys(j, path, {"type", "jam_spacing", "headway", "k_v", "a_max_plan",
                       "a_min_plan", "cth_on_ego"});
  LinearPlannerParams p;
  p.jam_spacing = opt_number(j, "jam_spacing", p.jam_spacing, path);
  p.headway = opt_number(j, "headway", p.headway, path);
  p.k_v = opt_schedule(j, "k_v", p.k_v, path);
  p.a_max_plan = opt_number(j, "a_max_plan", p.a_max_plan, path);
  p.a_min_plan = opt_number(j, "a_min_plan", p.a_min_plan, path);
  p.cth_on_ego = opt_bool(j, "cth_on_ego", p.cth_on_ego, path);
  return p;
}

MpcParams parse_mpc_planner(const json& j, const std::string& path) {
  check_keys(j, path, {"type", "headway", "tau", "gravity", "a_min", "a_max",
                       "dist_cap", "lead_accel_clamp", "weights", "solver"});
  MpcParams p;
  p.headway = opt_number(j, "headway", p.headway, path);
  p.tau = opt_number(j, "tau", p.tau, path);
  p.gravity = opt_number(j, "gravity", p.gravity, path);
  p.a_min = opt_number(j, "a_min", p.a_min, path);
  p.a_max = opt_number(j, "a_max", p.a_max, path);
  p.dist_cap = opt_number(j, "dist_cap", p.dist_cap, path);
  p.lead_accel_clamp = opt_number(j, "lead_accel_clamp", p.lead_accel_clamp, path);
  if (j.contains("weights")) {
    const json& w = j.at("weights");
    const std::string wp = path + ".weights";
    check_keys(w, wp, {"ttc", "dist", "accel", "jerk"});
    p.weights.ttc = opt_number(w, "ttc", p.weights.ttc, wp);
    p.weights.dist = opt_number(w, "dist", p.weights.dist, wp);
    p.weights.accel = opt_number(w, "accel", p.weights.accel, wp);
    p.weights.jerk = opt_number(w, "jerk", p.weights.jerk, wp);
  }
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    const std::string sp = path + ".solver";
    check_keys(s, sp, {"max_iterations", "step_size", "tolerance"});
    if (s.contains("max_iterations")) {
      if (!s.at("max_iterations").is_number_integer()) fail(sp + ".max_iterations", "expected an integer");
      p.solver.max_iterations = s.at("max_iterations").get<int>();
    }
    p.solver.step_size = opt_number(s, "step_size", p.solver.step_size, sp);
    p.solver.tolerance = opt_number(s, "tolerance", p.solver.tolerance, sp);
  }
  return p;
}

json planner_to_json(const VehicleSpec& v) {
  if (const auto* lin = std::get_if<LinearPlannerParams>(&v.planner)) {
    return json{{"type", "linear"},
                {"jam_spacing", lin->jam_spacing},
                {"headway", lin->headway},
                {"k_v", schedule_to_json(lin->k_v)},
                {"a_max_plan", lin->a_max_plan},
                {"a_min_plan", lin->a_min_plan},
                {"cth_on_ego", lin->cth_on_ego}};
  }
  const auto& m = std::get<MpcParams>(v.planner);
  return json{{"type", "mpc"},
              {"headway", m.headway},
              {"tau", m.tau},
              {"gravity", m.gravity},
              {"a_min", m.a_min},
              {"a_max", m.a_max},
              {"dist_cap", m.dist_cap},
              {"lead_accel_clamp", m.lead_accel_clamp},
              {"weights", json{{"ttc", m.weights.ttc},
                               {"dist", m.weights.dist},
                               {"accel", m.weights.accel},
                               {"jerk", m.weights.jerk}}},
              {"solver", json{{"max_iterations", m.solver.max_iterations},
                              {"step_size", m.solver.step_size},
                              {"tolerance", m.solver.tolerance}}}};
}

VehicleSpec parse_vehicle(const json& j, const std::string& path) {
  check_keys(j, path, {"planner", "controller", "actuator", "initial_spacing",
                       "initial_speed"});
  VehicleSpec v;
  if (j.contains("planner")) {
    const json& pj = j.at("planner");
    const std::string pp = path + ".planner";
    if (!pj.is_object() || !pj.contains("type")) fail(pp, "expected an object with a type");
    const std::string type = pj.at("type").get<std::string>();
    if (type == "linear") {
      v.planner = parse_linear_planner(pj, pp);
    } else if (type == "mpc") {
      v.planner = parse_mpc_planner(pj, pp);
    } else {
      fail(pp + ".type", "unknown planner type '" + type + "'");
    }
  }
  if (j.contains("controller")) v.controller = parse_controller(j.at("controller"), path + ".controller");
  if (j.contains("actuator")) v.actuator = parse_actuator(j.at("actuator"), path + ".actuator");
  if (j.contains("initial_spacing")) {
    const json& s = j.at("initial_spacing");
    if (s.is_string()) {
      if (s.get<std::string>() != "equilibrium") {
        fail(path + ".initial_spacing", "expected a number or \"equilibrium\"");
      }
    } else {
      v.initial_spacing = get_number(s, path + ".initial_spacing");
    }
  }
  if (j.contains("initial_speed")) {
    v.initial_speed = get_number(j.at("initial_speed"), path + ".initial_speed");
  }
  return v;
}

void validate_schedule_nonneg(const GainSchedule& s, const std::string& path) {
  if (s.min_value() < 0.0) fail(path, "must be >= 0 over the whole schedule");
}

}  // namespace

double LeadProfile::speed_at(double t, double v0) const {
  switch (kind) {
    case LeadProfileKind::kConstant:
      return v0;
    case LeadProfileKind::kStep:
      // The new speed takes effect strictly after the step time: a step at
      // t0 is still invisible to anything sampled exactly at t0.
      return t > step_time ? v0 + step_delta : v0;
    case LeadProfileKind::kSinusoid:
      return v0 + amplitude * std::sin(omega * t);
    case LeadProfileKind::kPiecewise: {
      if (points.empty()) return v0;
      if (t <= points.front().first) return points.front().second;
      if (t >= points.back().first) return points.back().second;
      for (std::size_t i = 1; i < points.size(); ++i) {
        if (t <= points[i].first) {
          const auto& [t0, s0] = points[i - 1];
          const auto& [t1, s1] = points[i];
          return s0 + (t - t0) / (t1 - t0) * (s1 - s0);
        }
      }
      return points.back().second;
    }
  }
  return v0;
}

double LeadProfile::min_speed(double v0, double duration) const {
  switch (kind) {
    case LeadProfileKind::kConstant:
      return v0;
    case LeadProfileKind::kStep:
      return step_time < duration ? v0 + std::min(0.0, step_delta) : v0;
    case LeadProfileKind::kSinusoid:
      // Conservative: assume a full cycle fits in the run.
      return v0 - std::abs(amplitude);
    case LeadProfileKind::kPiecewise: {
      double m = speed_at(0.0, v0);
      for (const auto& [t, v] : points) {
        if (t <= duration) m = std::min(m, v);
      }
      return m;
    }
  }
  return v0;
}

Scenario validate_scenario(const Scenario& s, std::vector<std::string>* warnings) {
  Scenario out = s;
  const TimingConfig& t = out.timing;
  if (t.plan_dt <= 0.0) fail("timing.plan_dt", "must be > 0");
  if (t.control_dt <= 0.0) fail("timing.control_dt", "must be > 0");
  if (t.duration <= 0.0) fail("timing.duration", "must be > 0");
  const double ratio = t.plan_dt / t.control_dt;
  if (std::abs(ratio - std::lround(ratio)) > 1e-9 * ratio || std::lround(ratio) < 1) {
    fail("timing.plan_dt", "must be an exact integer multiple of control_dt");
  }
  if (t.horizon_dt <= 0.0) fail("timing.horizon_dt", "must be > 0");
  const double hratio = t.mpc_horizon / t.horizon_dt;
  if (std::abs(hratio - std::lround(hratio)) > 1e-9 * hratio) {
    fail("timing.mpc_horizon", "must be an exact integer multiple of horizon_dt");
  }
  if (t.horizon_steps() < 2) fail("timing.mpc_horizon", "horizon must span at least 2 steps");

  if (out.noise.position_var < 0.0) fail("noise.position_var", "must be >= 0");
  if (out.noise.speed_var < 0.0) fail("noise.speed_var", "must be >= 0");

  if (out.lead_initial_speed < 0.0) fail("lead.initial_speed", "must be >= 0");
  LeadProfile& lp = out.lead_profile;
  if (lp.kind == LeadProfileKind::kSinusoid) {
    if (lp.amplitude < 0.0) fail("lead.profile.amplitude", "must be >= 0");
    if (lp.omega <= 0.0) fail("lead.profile.omega", "must be > 0");
  }
  if (lp.kind == LeadProfileKind::kPiecewise) {
    if (lp.points.empty()) fail("lead.profile.points", "must not be empty");
    for (std::size_t i = 0; i < lp.points.size(); ++i) {
      if (lp.points[i].second < 0.0) {
        fail("lead.profile.points[" + std::to_string(i) + "]", "speed must be >= 0");
      }
      if (i > 0 && lp.points[i].first <= lp.points[i - 1].first) {
        fail("lead.profile.points[" + std::to_string(i) + "]", "time must be strictly increasing");
      }
    }
    // Piecewise tables define the speed directly; pin the initial speed
    // to the table so the scenario is self-consistent.
    out.lead_initial_speed = lp.speed_at(0.0, out.lead_initial_speed);
  }
  if (lp.min_speed(out.lead_initial_speed, t.duration) < 0.0) {
    fail("lead.profile", "profile reaches a negative speed within the run");
  }

  if (out.vehicles.empty()) fail("vehicles", "empty platoon: at least one follower required");

  for (std::size_t i = 0; i < out.vehicles.size(); ++i) {
    VehicleSpec& v = out.vehicles[i];
    const std::string vp = "vehicles[" + std::to_string(i) + "]";

    const ControllerConfig& c = v.controller;
    if (!(c.a_min < 0.0 && 0.0 < c.a_max)) fail(vp + ".controller.a_max", "needs a_min < 0 < a_max");
    if (c.overshoot_allowance <= 0.0) fail(vp + ".controller.overshoot_allowance", "must be > 0");
    if (c.deadzone < 0.0) fail(vp + ".controller.deadzone", "must be >= 0");
    validate_schedule_nonneg(c.kp, vp + ".controller.kp");
    validate_schedule_nonneg(c.ki, vp + ".controller.ki");
    validate_schedule_nonneg(c.kf, vp + ".controller.kf");
    if (c.antiwindup.mode == AntiWindupMode::kClamp && c.antiwindup.limit <= 0.0) {
      fail(vp + ".controller.antiwindup.limit", "clamp mode needs a positive limit");
    }

    const ActuatorModel& m = v.actuator;
    if (m.cmd_scale.min_value() <= 0.0) fail(vp + ".actuator.cmd_scale", "must be > 0");
    if (m.resp_scale <= 0.0) fail(vp + ".actuator.resp_scale", "must be > 0");
    if (m.lag_tau < 0.0) fail(vp + ".actuator.lag_tau", "must be >= 0");

    if (const auto* lin = std::get_if<LinearPlannerParams>(&v.planner)) {
      if (lin->jam_spacing <= 0.0) fail(vp + ".planner.jam_spacing", "must be > 0");
      if (lin->headway <= 0.0) fail(vp + ".planner.headway", "must be > 0");
      if (lin->k_v.min_value() <= 0.0) fail(vp + ".planner.k_v", "must be > 0");
      if (lin->a_max_plan <= 0.0) fail(vp + ".planner.a_max_plan", "must be > 0");
      if (lin->a_min_plan >= 0.0) fail(vp + ".planner.a_min_plan", "must be < 0");
      const double prod_hi = lin->k_v.max_value() * lin->headway;
      if (warnings && prod_hi > 2.0) {
        warnings->push_back(vp + ".planner: k_v*headway = " + std::to_string(prod_hi) +
                            " > 2, configuration is not string stable");
      }
    } else {
      const MpcParams& mp = std::get<MpcParams>(v.planner);
      if (mp.headway <= 0.0) fail(vp + ".planner.headway", "must be > 0");
      if (mp.tau < 0.0) fail(vp + ".planner.tau", "must be >= 0");
      if (mp.gravity <= 0.0) fail(vp + ".planner.gravity", "must be > 0");
      if (!(mp.a_min < 0.0 && 0.0 < mp.a_max)) fail(vp + ".planner.a_max", "needs a_min < 0 < a_max");
      if (mp.dist_cap <= 0.0) fail(vp + ".planner.dist_cap", "must be > 0");
      if (mp.lead_accel_clamp <= 0.0) fail(vp + ".planner.lead_accel_clamp", "must be > 0");
      if (mp.weights.ttc < 0.0 || mp.weights.dist < 0.0 || mp.weights.accel < 0.0 ||
          mp.weights.jerk < 0.0) {
        fail(vp + ".planner.weights", "must be >= 0");
      }
      if (mp.solver.max_iterations < 1) fail(vp + ".planner.solver.max_iterations", "must be >= 1");
      if (mp.solver.step_size <= 0.0) fail(vp + ".planner.solver.step_size", "must be > 0");
      if (mp.solver.tolerance <= 0.0) fail(vp + ".planner.solver.tolerance", "must be > 0");
    }

    if (v.initial_speed && *v.initial_speed < 0.0) fail(vp + ".initial_speed", "must be >= 0");
    if (!v.initial_speed) v.initial_speed = out.lead_initial_speed;

    if (v.initial_spacing && *v.initial_spacing <= 0.0) fail(vp + ".initial_spacing", "must be > 0");
    if (!v.initial_spacing) {
      // Equilibrium gap for this vehicle's planner at the initial speeds.
      const double v_pred = (i == 0) ? out.lead_initial_speed : *out.vehicles[i - 1].initial_speed;
      const double v_self = *v.initial_speed;
      double gap = 0.0;
      if (const auto* lin = std::get_if<LinearPlannerParams>(&v.planner)) {
        gap = desired_spacing(*lin, v_pred, v_self);
      } else {
        gap = mpc_desired_spacing(v_self, v_pred, std::get<MpcParams>(v.planner));
      }
      if (gap <= 0.0) fail(vp + ".initial_spacing", "equilibrium spacing is not positive at these speeds");
      v.initial_spacing = gap;
    }
  }
  return out;
}

Scenario parse_scenario(const std::string& json_text, std::vector<std::string>* warnings) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    // nlohmann reports a byte offset; convert to line/column.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < json_text.size(); ++i) {
      if (json_text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ScenarioError("JSON parse error at line " + std::to_string(line) +
                        ", column " + std::to_string(col) + ": " + e.what());
  }
  if (!j.is_object()) throw ScenarioError("scenario: top level must be an object");
  check_keys(j, "scenario", {"timing", "noise", "lead", "vehicles"});

  Scenario s;
  if (j.contains("timing")) s.timing = parse_timing(j.at("timing"), "timing");
  if (j.contains("noise")) s.noise = parse_noise(j.at("noise"), "noise");
  if (j.contains("lead")) {
    const json& lj = j.at("lead");
    check_keys(lj, "lead", {"initial_speed", "profile"});
    s.lead_initial_speed = opt_number(lj, "initial_speed", s.lead_initial_speed, "lead");
    if (lj.contains("profile")) s.lead_profile = parse_profile(lj.at("profile"), "lead.profile");
  }
  if (j.contains("vehicles")) {
    const json& vj = j.at("vehicles");
    if (!vj.is_array()) fail("vehicles", "expected an array");
    for (std::size_t i = 0; i < vj.size(); ++i) {
      s.vehicles.push_back(parse_vehicle(vj[i], "vehicles[" + std::to_string(i) + "]"));
    }
  }
  return validate_scenario(s, warnings);
}

std::string serialize_scenario(const Scenario& s) {
  json vehicles = json::array();
  for (const VehicleSpec& v : s.vehicles) {
    json vj{{"planner", planner_to_json(v)},
            {"controller", controller_to_json(v.controller)},
            {"actuator", actuator_to_json(v.actuator)}};
    if (v.initial_spacing) vj["initial_spacing"] = *v.initial_spacing;
    if (v.initial_speed) vj["initial_speed"] = *v.initial_speed;
    vehicles.push_back(std::move(vj));
  }
  const json j{{"timing", json{{"plan_dt", s.timing.plan_dt},
                               {"control_dt", s.timing.control_dt},
                               {"horizon_dt", s.timing.horizon_dt},
                               {"mpc_horizon", s.timing.mpc_horizon},
                               {"duration", s.timing.duration}}},
               {"noise", json{{"enabled", s.noise.enabled},
                              {"position_var", s.noise.position_var},
                              {"speed_var", s.noise.speed_var},
                              {"seed", s.noise.seed}}},
               {"lead", json{{"initial_speed", s.lead_initial_speed},
                             {"profile", profile_to_json(s.lead_profile)}}},
               {"vehicles", vehicles}};
  return j.dump(2) + "\n";
}

Scenario load_scenario(const std::filesystem::path& path,
                       std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str(), warnings);
  } catch (const ScenarioError& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
}

LeadProfile ingest_external_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open lead trace file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ScenarioError(path.string() + ": empty file");
  // Tolerate whitespace and an optional \r in the header.
  std::string header = line;
  std::erase_if(header, [](char c) { return c == ' ' || c == '\r'; });
  if (header != "t,v") {
    throw ScenarioError(path.string() + ": expected header \"t,v\", got \"" + line + "\"");
  }
  LeadProfile p;
  p.kind = LeadProfileKind::kPiecewise;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    std::istringstream ls(line);
    double t = 0.0, v = 0.0;
    char comma = 0;
    if (!(ls >> t >> comma >> v) || comma != ',') {
      throw ScenarioError(path.string() + ": row " + std::to_string(row) + ": malformed line");
    }
    if (!p.points.empty() && t <= p.points.back().first) {
      throw ScenarioError(path.string() + ": row " + std::to_string(row) +
                          ": time must be strictly increasing");
    }
    if (v < 0.0) {
      throw ScenarioError(path.string() + ": row " + std::to_string(row) + ": negative speed");
    }
    p.points.emplace_back(t, v);
  }
  if (p.points.empty()) throw ScenarioError(path.string() + ": no data rows");
  return p;
}

}  // namespace accsim

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "accsim/scenario.hpp"

using namespace accsim;
namespace fs = std::filesystem;

namespace {

Scenario minimal() {
  Scenario s;
  s.vehicles.emplace_back();
  return s;
}

std::string error_of(const std::string& json_text) {
  try {
    parse_scenario(json_text);
  } catch (const ScenarioError& e) {
    return e.what();
  }
  return "";
}

struct TempFile {
  fs::path path;
  explicit TempFile(const std::string& name, const std::string& content)
      : path(fs::temp_directory_path() / name) {
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::error_code ec; fs::remove(path, ec); }
};

}  // namespace

TEST_CASE("default timing is accepted: 5 control steps per plan step") {
  const Scenario v = validate_scenario(minimal());
  CHECK(v.timing.plan_dt == 0.05);
  CHECK(v.timing.control_dt == 0.01);
  CHECK(v.timing.control_steps_per_plan() == 5);
}

TEST_CASE("non-integer plan/control ratio is rejected") {
  Scenario s = minimal();
  s.timing.control_dt = 0.03;
  CHECK_THROWS_WITH_AS(validate_scenario(s),
                       "timing.plan_dt: must be an exact integer multiple of control_dt",
                       ScenarioError);
}

TEST_CASE("zero followers is rejected") {
  Scenario s;
  CHECK_THROWS_WITH_AS(validate_scenario(s),
                       "vehicles: empty platoon: at least one follower required",
                       ScenarioError);
}

TEST_CASE("negative ki is rejected with its field path") {
  const std::string text = R"({
    "vehicles": [{"controller": {"ki": -0.1}}]
  })";
  CHECK(error_of(text) == "vehicles[0].controller.ki: must be >= 0 over the whole schedule");
}

TEST_CASE("unknown keys are rejected at every level") {
  CHECK(error_of(R"({"bogus": 1, "vehicles": [{}]})") == "scenario.bogus: unknown key");
  CHECK(error_of(R"({"timing": {"plan_DT": 0.05}, "vehicles": [{}]})") ==
        "timing.plan_DT: unknown key");
  CHECK(error_of(R"({"vehicles": [{"controller": {"kd": 1.0}}]})") ==
        "vehicles[0].controller.kd: unknown key");
  CHECK(error_of(R"({"vehicles": [{"planner": {"type": "linear", "head_way": 1.5}}]})") ==
        "vehicles[0].planner.head_way: unknown key");
}

TEST_CASE("parse errors carry line and column") {
  const std::string text = "{\n  \"timing\": {,}\n}";
  const std::string err = error_of(text);
  CHECK(err.find("line 2") != std::string::npos);
  CHECK(err.find("column") != std::string::npos);
}

TEST_CASE("empty file is a parse error") {
  CHECK(error_of("").find("JSON parse error") == 0);
}

TEST_CASE("equilibrium spacing resolves per planner kind") {
  Scenario s = minimal();
  s.lead_initial_speed = 20.0;
  s.vehicles.emplace_back();
  s.vehicles[1].planner = MpcParams{};
  const Scenario v = validate_scenario(s);
  // Linear: jam 2 + headway 1.5 * 20; MPC: headway 1.5 * 20.
  CHECK(*v.vehicles[0].initial_spacing == doctest::Approx(32.0));
  CHECK(*v.vehicles[1].initial_spacing == doctest::Approx(30.0));
  CHECK(*v.vehicles[0].initial_speed == 20.0);
}

TEST_CASE("explicit initial conditions survive validation unchanged") {
  Scenario s = minimal();
  s.vehicles[0].initial_spacing = 12.5;
  s.vehicles[0].initial_speed = 17.0;
  const Scenario v = validate_scenario(s);
  CHECK(*v.vehicles[0].initial_spacing == 12.5);
  CHECK(*v.vehicles[0].initial_speed == 17.0);
}

TEST_CASE("piecewise lead profile pins the initial speed to the table") {
  Scenario s = minimal();
  s.lead_initial_speed = 99.0;
  s.lead_profile.kind = LeadProfileKind::kPiecewise;
  s.lead_profile.points = {{0.0, 15.0}, {10.0, 18.0}};
  const Scenario v = validate_scenario(s);
  CHECK(v.lead_initial_speed == 15.0);
}

TEST_CASE("profiles that dip below zero speed are rejected") {
  Scenario s = minimal();
  s.lead_initial_speed = 3.0;
  s.lead_profile.kind = LeadProfileKind::kStep;
  s.lead_profile.step_time = 5.0;
  s.lead_profile.step_delta = -5.0;
  CHECK_THROWS_AS(validate_scenario(s), ScenarioError);
}

TEST_CASE("string-unstable k_v*headway only warns") {
  Scenario s = minimal();
  auto& lin = std::get<LinearPlannerParams>(s.vehicles[0].planner);
  lin.k_v = GainSchedule(2.0);
  lin.headway = 1.5;  // product 3 > 2
  std::vector<std::string> warnings;
  CHECK_NOTHROW(validate_scenario(s, &warnings));
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("not string stable") != std::string::npos);
}

TEST_CASE("round-trip: parse(serialize(s)) == s for a rich scenario") {
  Scenario s;
  s.timing.duration = 45.0;
  s.noise.enabled = true;
  s.noise.seed = 12345;
  s.lead_initial_speed = 22.0;
  s.lead_profile.kind = LeadProfileKind::kSinusoid;
  s.lead_profile.amplitude = 1.5;
  s.lead_profile.omega = 0.4;

  VehicleSpec lin;
  auto& lp = std::get<LinearPlannerParams>(lin.planner);
  lp.k_v = GainSchedule(std::vector<std::pair<double, double>>{{0.0, 0.8}, {25.0, 0.4}});
  lin.controller.kp = GainSchedule(1.2);
  lin.controller.ki = GainSchedule(0.33);
  lin.controller.antiwindup = {AntiWindupMode::kClamp, 2.5};
  lin.controller.deadzone = 0.1;
  lin.actuator.resp_scale = 1.8;
  s.vehicles.push_back(lin);

  VehicleSpec mpc;
  mpc.planner = MpcParams{};
  std::get<MpcParams>(mpc.planner).weights.jerk = 25.0;
  mpc.controller.kf = GainSchedule(1.2);
  mpc.controller.antiwindup = {AntiWindupMode::kFreeze, 0.0};
  mpc.initial_spacing = 40.0;
  mpc.initial_speed = 21.0;
  s.vehicles.push_back(mpc);

  const Scenario validated = validate_scenario(s);
  const std::string text = serialize_scenario(validated);
  const Scenario reparsed = parse_scenario(text);
  CHECK(reparsed == validated);
  // And serializing again is byte-stable.
  CHECK(serialize_scenario(reparsed) == text);
}

TEST_CASE("clamp antiwindup without a limit defaults to a_max/ki") {
  const std::string text = R"({
    "vehicles": [{
      "controller": {"ki": 0.33, "a_max": 1.5, "antiwindup": {"mode": "clamp"}}
    }]
  })";
  const Scenario s = parse_scenario(text);
  CHECK(s.vehicles[0].controller.antiwindup.limit == doctest::Approx(1.5 / 0.33));
}

TEST_CASE("schedules parse from numbers and breakpoint tables") {
  const std::string text = R"({
    "vehicles": [{
      "planner": {"type": "linear", "k_v": {"breakpoints": [[0, 1.0], [20, 0.4]]}},
      "controller": {"kp": 0.9}
    }]
  })";
  const Scenario s = parse_scenario(text);
  const auto& lin = std::get<LinearPlannerParams>(s.vehicles[0].planner);
  CHECK(lin.k_v(10.0) == doctest::Approx(0.7));
  CHECK(s.vehicles[0].controller.kp(5.0) == doctest::Approx(0.9));
}

TEST_CASE("ingest_external_trace: constant profile from two rows") {
  TempFile f("accsim_lead_ok.csv", "t,v\n0,10\n60,10\n");
  const LeadProfile p = ingest_external_trace(f.path);
  CHECK(p.kind == LeadProfileKind::kPiecewise);
  CHECK(p.speed_at(0.0, 0.0) == 10.0);
  CHECK(p.speed_at(30.0, 0.0) == 10.0);
  CHECK(p.speed_at(60.0, 0.0) == 10.0);
}

TEST_CASE("ingest_external_trace: 20 Hz rows interpolate between knots") {
  std::string rows = "t,v\n";
  for (int i = 0; i <= 20; ++i) {
    rows += std::to_string(i * 0.05) + "," + std::to_string(10.0 + 0.1 * i) + "\n";
  }
  TempFile f("accsim_lead_20hz.csv", rows);
  const LeadProfile p = ingest_external_trace(f.path);
  // Sample midway between two 20 Hz knots (a 100 Hz tick).
  CHECK(p.speed_at(0.07, 0.0) == doctest::Approx(10.14).epsilon(1e-9));
  CHECK(p.speed_at(0.05, 0.0) == doctest::Approx(10.1).epsilon(1e-9));
}

TEST_CASE("ingest_external_trace: out-of-order timestamps are rejected") {
  TempFile f("accsim_lead_bad_t.csv", "t,v\n0,10\n2,11\n1,12\n");
  CHECK_THROWS_AS(ingest_external_trace(f.path), ScenarioError);
}

TEST_CASE("ingest_external_trace: negative speed is rejected") {
  TempFile f("accsim_lead_bad_v.csv", "t,v\n0,10\n1,-2\n");
  CHECK_THROWS_AS(ingest_external_trace(f.path), ScenarioError);
}

TEST_CASE("ingest_external_trace: wrong header is rejected") {
  TempFile f("accsim_lead_bad_h.csv", "time,speed\n0,10\n");
  CHECK_THROWS_AS(ingest_external_trace(f.path), ScenarioError);
}

TEST_CASE("load_scenario: missing file reports the path") {
  CHECK_THROWS_AS(load_scenario("/nonexistent/dir/file.json"), ScenarioError);
}

TEST_CASE("bundled gallery: every scenario loads; the undershoot file has resp/cmd < 1") {
  const fs::path dir = ACCSIM_SCENARIO_DIR;
  const char* names[] = {"fig2_undershoot.json", "fig3_overshoot.json",
                         "fig4_windup.json",     "fig5_pgain.json",
                         "fig6_fgain.json",      "fig7_noise.json",
                         "realcar_fast.json",    "realcar_slow.json"};
  for (const char* name : names) {
    CAPTURE(name);
    const Scenario sc = load_scenario(dir / name);
    CHECK_FALSE(sc.vehicles.empty());
  }

  const Scenario under = load_scenario(dir / "fig2_undershoot.json");
  for (const VehicleSpec& v : under.vehicles) {
    CHECK(v.actuator.resp_scale / v.actuator.cmd_scale(20.0) < 1.0);
  }
}

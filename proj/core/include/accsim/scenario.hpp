#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "accsim/linear_planner.hpp"
#include "accsim/mpc_planner.hpp"
#include "accsim/types.hpp"

namespace accsim {

/// Scenario/parse/validation failure; the message carries the offending
/// field path (or line/column for JSON syntax errors).
struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class LeadProfileKind { kConstant, kStep, kSinusoid, kPiecewise };

/// Scripted lead-speed profile. Piecewise tables hold (t, v) knots with
/// strictly increasing t, linearly interpolated and held flat outside.
struct LeadProfile {
  LeadProfileKind kind = LeadProfileKind::kConstant;
  double step_time = 0.0;
  double step_delta = 0.0;
  double amplitude = 0.0;
  double omega = 1.0;
  std::vector<std::pair<double, double>> points;

  double speed_at(double t, double v0) const;
  /// Smallest speed the profile reaches in [0, duration].
  double min_speed(double v0, double duration) const;

  friend bool operator==(const LeadProfile&, const LeadProfile&) = default;
};

/// One follower: planner choice and parameters, low-level controller,
/// actuator map, and initial conditions. Omitted initial conditions mean
/// "equilibrium spacing" / "lead's initial speed" and are resolved to
/// concrete numbers by validate_scenario.
struct VehicleSpec {
  std::variant<LinearPlannerParams, MpcParams> planner{LinearPlannerParams{}};
  ControllerConfig controller{};
  ActuatorModel actuator{};
  std::optional<double> initial_spacing{};
  std::optional<double> initial_speed{};

  bool uses_mpc() const { return std::holds_alternative<MpcParams>(planner); }

  friend bool operator==(const VehicleSpec&, const VehicleSpec&) = default;
};

struct Scenario {
  TimingConfig timing{};
  NoiseConfig noise{};
  double lead_initial_speed = 20.0;
  LeadProfile lead_profile{};
  std::vector<VehicleSpec> vehicles{};

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Checks every type invariant and returns a normalized copy with all
/// optional initial conditions resolved to numbers. Throws ScenarioError
/// naming the first violated field. Non-fatal advisories (e.g. a
/// k_v*headway product outside the string-stable band) are appended to
/// *warnings when given.
Scenario validate_scenario(const Scenario& s,
                           std::vector<std::string>* warnings = nullptr);

/// Parse + validate a scenario JSON document. Unknown keys are rejected.
Scenario parse_scenario(const std::string& json_text,
                        std::vector<std::string>* warnings = nullptr);

/// Canonical JSON form (all fields explicit). parse(serialize(s)) == s for
/// any validated scenario.
std::string serialize_scenario(const Scenario& s);

Scenario load_scenario(const std::filesystem::path& path,
                       std::vector<std::string>* warnings = nullptr);

/// Reads a recorded lead drive as CSV with header "t,v" (seconds, m/s,
/// strictly increasing t) into a piecewise lead profile.
LeadProfile ingest_external_trace(const std::filesystem::path& path);

}  // namespace accsim

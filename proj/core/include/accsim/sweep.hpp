#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "accsim/scenario.hpp"
#include "accsim/ss_metrics.hpp"

namespace accsim {

/// Outcome of one sweep point. `index` is I_linear or I_mpc of the last
/// follower depending on its planner; amplification ratios use the
/// platoon-wide response window.
struct SweepRow {
  double value = 0.0;
  std::string status;  // ok | collision | nan | error
  std::optional<double> index{};
  std::optional<double> amp_last_pair{};  // last follower vs its predecessor
  std::optional<double> amp_end_to_end{};  // last follower vs the lead
  std::string error;  // populated when something in this run failed
};

struct SweepSummary {
  std::string param;
  std::vector<SweepRow> rows;

  bool all_ok() const {
    for (const SweepRow& r : rows) {
      if (r.status != "ok") return false;
    }
    return true;
  }
};

/// Sets a numeric field addressed by a dotted path (e.g.
/// "vehicles[0].actuator.resp_scale", with [*] fanning out over all array
/// elements) in the scenario and re-validates. Throws ScenarioError for
/// paths that do not resolve to a number.
Scenario patch_scenario(const Scenario& base, const std::string& param_path,
                        double value);

/// One simulation + analysis per value; runs never share mutable state and
/// may execute on up to `jobs` threads. Individual run failures are
/// recorded in their row and the sweep continues.
SweepSummary run_sweep(const Scenario& base, const std::string& param_path,
                       std::span<const double> values, int jobs = 1,
                       const WindowParams& window = {});

/// CSV rendering: value,status,ss_index,amp_last_pair,amp_end_to_end,collision.
std::string sweep_summary_csv(const SweepSummary& summary);

}  // namespace accsim

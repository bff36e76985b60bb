#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "accsim/types.hpp"

namespace accsim {

struct TraceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class RunStatus { kOk, kCollision, kNan };

/// One (tick, vehicle) log row. Planner/controller fields are absent for
/// the lead vehicle; v_target is logged by linear planners, a_target (and
/// a_pid) by MPC planners.
struct TickRecord {
  double t = 0.0;
  int vehicle = 0;  // 0 = lead, 1..N = followers in platoon order
  VehicleState state{};
  std::optional<double> v_target{};
  std::optional<double> a_target{};
  std::optional<double> v_pid{};
  std::optional<double> a_pid{};
  std::optional<double> p_term{};
  std::optional<double> i_term{};
  std::optional<double> f_term{};
  std::optional<double> control{};
  std::optional<double> gb{};

  friend bool operator==(const TickRecord&, const TickRecord&) = default;
};

/// Per-solve diagnostics logged at MPC plan ticks.
struct SolveDiag {
  double t = 0.0;
  int vehicle = 0;
  int iterations = 0;
  bool converged = true;
  bool cost_monotone = true;
  double initial_cost = 0.0;
  double final_cost = 0.0;

  friend bool operator==(const SolveDiag&, const SolveDiag&) = default;
};

struct PlatoonTrace {
  TimingConfig timing{};
  int vehicle_count = 0;  // lead + followers
  RunStatus status = RunStatus::kOk;
  long fail_tick = -1;  // first bad tick for collision/NaN statuses
  std::vector<TickRecord> records;  // tick-major, vehicle order within a tick
  std::vector<SolveDiag> solves;

  int tick_count() const {
    return vehicle_count > 0 ? static_cast<int>(records.size()) / vehicle_count : 0;
  }
  const TickRecord& at(int tick, int vehicle) const {
    return records[static_cast<std::size_t>(tick) * vehicle_count + vehicle];
  }

  friend bool operator==(const PlatoonTrace&, const PlatoonTrace&) = default;
};

/// Fixed-column CSV: t, vehicle_id, x, v, a, v_target, a_target, v_pid,
/// a_pid, p_term, i_term, f_term, control, gb. Absent fields are empty;
/// floats carry 12 significant digits.
void write_trace_csv(const PlatoonTrace& trace, std::ostream& out);
void write_trace_csv(const PlatoonTrace& trace, const std::filesystem::path& path);

/// Reads a trace CSV back. Tick spacing and vehicle count are recovered
/// from the rows; plan_dt and horizon_dt cannot be (they are not stored in
/// the CSV), so callers supply them for plan-tick analyses.
PlatoonTrace read_trace_csv(std::istream& in, double plan_dt = 0.05,
                            double horizon_dt = 0.2);
PlatoonTrace read_trace_csv(const std::filesystem::path& path,
                            double plan_dt = 0.05, double horizon_dt = 0.2);

}  // namespace accsim

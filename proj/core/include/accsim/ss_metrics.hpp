#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "accsim/trace.hpp"

namespace accsim {

/// Raised when an index is undefined on the given data (e.g. the lead
/// speed change is below the 0.1 m/s floor, or zero upstream excursion).
struct MetricError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Reaction window: onset T1 and stabilization span dt, both seconds.
struct ResponseWindow {
  double t1 = 0.0;
  double dt = 0.0;

  friend bool operator==(const ResponseWindow&, const ResponseWindow&) = default;
};

struct WindowParams {
  double theta1 = 0.05;  // onset threshold on |setpoint rate| [m/s^2]
  double theta2 = 0.02;  // settled threshold on |setpoint rate| [m/s^2]
  double hold = 0.5;     // how long the rate must stay below theta2 [s]
};

/// Scans the vehicle's planner setpoint (v_target for linear planners,
/// v_pid anchors for MPC) at plan ticks. T1 is the first post-event tick
/// whose rate magnitude exceeds theta1; the window closes when the
/// setpoint stops moving toward the predecessor's settled speed (reversal)
/// or its rate stays below theta2 for the hold period. Returns nullopt
/// when no reaction is found.
std::optional<ResponseWindow> detect_response_window(const PlatoonTrace& trace,
                                                     int vehicle, double event_time,
                                                     const WindowParams& params = {});

struct LinearIndexParams {
  // Present when the caller knows the planner gains; enables the bound form.
  std::optional<double> k_v{};
  std::optional<double> headway{};
};

struct LinearIndexResult {
  double index = 0.0;                 // (|dv_target| - |dv_lead|)/|dv_lead|
  std::optional<double> bound{};      // k_v((|v_rel|+|e|)/|a_lead| - H_t)
  double dv_target = 0.0;
  double dv_lead = 0.0;
};

/// Definitional linear string-stability index over the window, plus the
/// derivation's bound form when gains are supplied. The vehicle's
/// predecessor provides the lead speed series.
LinearIndexResult linear_ss_index(const PlatoonTrace& trace, int vehicle,
                                  const ResponseWindow& window,
                                  const LinearIndexParams& params = {});

/// Time-domain MPC index over the window: -1 plus the plan-tick sums of
/// |a_target| and the geometric a_start response to |a_target|, scaled by
/// 2|dv_lead|. Smaller is more string stable.
double mpc_ss_index(const PlatoonTrace& trace, int vehicle,
                    const ResponseWindow& window);

/// Signed closed-form reconstruction of the v_start change across the
/// window from the logged a_target series (the same recursion the engine
/// integrates). Used as an internal-consistency check.
double mpc_vstart_change(const PlatoonTrace& trace, int vehicle,
                         const ResponseWindow& window);

/// (max-min of downstream true speed)/(max-min of upstream true speed)
/// over [t1, t1+dt]; < 1 means the downstream vehicle damps the wave.
double amplification_ratio(const PlatoonTrace& trace, int upstream,
                           int downstream, const ResponseWindow& window);

/// Closed-form speed-to-speed magnitude response of the ideally tracked
/// constant-time-headway planner.
double transfer_gain(double k_v, double headway, double omega);

std::vector<double> log_grid(double lo, double hi, int points);

struct HinfResult {
  double sup_gain = 0.0;
  bool satisfied = false;  // sup <= 1 + 1e-9
};

HinfResult hinf_check(double k_v, double headway, std::span<const double> omega_grid);

/// First time the lead's logged acceleration magnitude exceeds 0.1 m/s^2
/// (0 when it never does) — the default analysis event time.
double default_event_time(const PlatoonTrace& trace);

/// Union of every follower's detected response window; nullopt when no
/// follower reacts.
std::optional<ResponseWindow> platoon_response_window(const PlatoonTrace& trace,
                                                      double event_time,
                                                      const WindowParams& params = {});

struct AnalyzeOptions {
  bool mpc = false;                    // which index to compute
  int vehicle = -1;                    // -1: last follower
  std::optional<double> event_time{};  // default: detected from the lead series
  std::optional<double> k_v{};
  std::optional<double> headway{};
  WindowParams window{};
};

/// Full analysis of one trace as a JSON report: detected window, the
/// applicable index, per-pair amplification ratios, and (when gains are
/// given) the closed-form h-inf check.
std::string analyze_trace_report(const PlatoonTrace& trace, const AnalyzeOptions& options);

}  // namespace accsim

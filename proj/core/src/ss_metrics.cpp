#include "accsim/ss_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

namespace accsim {
namespace {

constexpr double kDvLeadFloor = 0.1;  // [m/s] guard on index denominators

int steps_per_plan(const PlatoonTrace& trace) {
  return std::max(1, static_cast<int>(std::lround(trace.timing.plan_dt /
                                                  trace.timing.control_dt)));
}

// The planner setpoint sampled at plan ticks: v_target when present
// (linear pipeline), otherwise v_pid (the MPC v_start anchors).
std::vector<double> plan_setpoint_series(const PlatoonTrace& trace, int vehicle) {
  const int spp = steps_per_plan(trace);
  std::vector<double> out;
  for (int tick = 0; tick < trace.tick_count(); tick += spp) {
    const TickRecord& r = trace.at(tick, vehicle);
    if (r.v_target) {
      out.push_back(*r.v_target);
    } else if (r.v_pid) {
      out.push_back(*r.v_pid);
    } else {
      throw MetricError("vehicle " + std::to_string(vehicle) +
                        " logs no planner setpoint (is it the lead?)");
    }
  }
  return out;
}

std::vector<double> plan_speed_series(const PlatoonTrace& trace, int vehicle) {
  const int spp = steps_per_plan(trace);
  std::vector<double> out;
  for (int tick = 0; tick < trace.tick_count(); tick += spp) {
    out.push_back(trace.at(tick, vehicle).state.v);
  }
  return out;
}

std::vector<double> plan_atarget_series(const PlatoonTrace& trace, int vehicle) {
  const int spp = steps_per_plan(trace);
  std::vector<double> out;
  for (int tick = 0; tick < trace.tick_count(); tick += spp) {
    const TickRecord& r = trace.at(tick, vehicle);
    if (!r.a_target) {
      throw MetricError("vehicle " + std::to_string(vehicle) +
                        " logs no a_target; the MPC index needs an MPC trace");
    }
    out.push_back(*r.a_target);
  }
  return out;
}

// Window bounds as plan-tick indices, clamped into the series.
std::pair<int, int> window_plan_indices(const PlatoonTrace& trace,
                                        const ResponseWindow& w, int series_len) {
  const double dt_hat = trace.timing.plan_dt;
  int m1 = static_cast<int>(std::lround(w.t1 / dt_hat));
  int m2 = static_cast<int>(std::lround((w.t1 + w.dt) / dt_hat));
  m1 = std::clamp(m1, 0, series_len - 1);
  m2 = std::clamp(m2, 0, series_len - 1);
  if (m2 <= m1) throw MetricError("response window is empty at plan resolution");
  return {m1, m2};
}

void check_vehicle(const PlatoonTrace& trace, int vehicle) {
  if (vehicle < 0 || vehicle >= trace.vehicle_count) {
    throw MetricError("vehicle index " + std::to_string(vehicle) + " out of range");
  }
}

// Recovers the pre-run a_start seed from the first logged a_pid value:
// a_pid(0) is the post-update anchor, a_pre + r (a_target(0) - a_pre).
double astart_seed(const PlatoonTrace& trace, int vehicle, double r,
                   const std::vector<double>& a_target) {
  const TickRecord& first = trace.at(0, vehicle);
  if (first.a_pid && r < 1.0) {
    return (*first.a_pid - r * a_target.front()) / (1.0 - r);
  }
  return 0.0;
}

}  // namespace

std::optional<ResponseWindow> detect_response_window(const PlatoonTrace& trace,
                                                     int vehicle, double event_time,
                                                     const WindowParams& params) {
  check_vehicle(trace, vehicle);
  if (vehicle == 0) return std::nullopt;
  const std::vector<double> y = plan_setpoint_series(trace, vehicle);
  if (y.size() < 3) return std::nullopt;
  const double dt_hat = trace.timing.plan_dt;
  const int n = static_cast<int>(y.size());

  int m_start = -1;
  for (int m = 1; m < n; ++m) {
    const double t = m * dt_hat;
    if (t <= event_time) continue;
    if (std::abs(y[m] - y[m - 1]) / dt_hat > params.theta1) {
      m_start = m;
      break;
    }
  }
  if (m_start < 0) return std::nullopt;

  const int hold_ticks = std::max(1, static_cast<int>(std::lround(params.hold / dt_hat)));

  // The window ends at the excursion extreme: the first substantive move
  // against the onset direction (the setpoint turns back and starts
  // reducing its overshoot), or a quiet hold. Moves slower than theta2
  // already count as "not moving" and are left to the quiet rule.
  const double dir = y[m_start] - y[m_start - 1];
  int m_end = n - 1;
  for (int m = m_start + 1; m < n; ++m) {
    const double move = y[m] - y[m - 1];
    if (std::abs(move) / dt_hat >= params.theta2 && move * dir < 0.0) {
      m_end = m;
      break;
    }
    if (m + hold_ticks <= n) {
      bool quiet = true;
      for (int j = m; j < m + hold_ticks; ++j) {
        if (std::abs(y[j] - y[j - 1]) / dt_hat >= params.theta2) {
          quiet = false;
          break;
        }
      }
      if (quiet) {
        m_end = m;
        break;
      }
    }
  }
  if (m_end <= m_start) return std::nullopt;
  return ResponseWindow{m_start * dt_hat, (m_end - m_start) * dt_hat};
}

LinearIndexResult linear_ss_index(const PlatoonTrace& trace, int vehicle,
                                  const ResponseWindow& window,
                                  const LinearIndexParams& params) {
  check_vehicle(trace, vehicle);
  if (vehicle == 0) throw MetricError("the lead vehicle has no planner index");
  const std::vector<double> y = plan_setpoint_series(trace, vehicle);
  const std::vector<double> v_lead = plan_speed_series(trace, vehicle - 1);
  const auto [m1, m2] = window_plan_indices(trace, window, static_cast<int>(y.size()));
  // Anchor the "from" endpoint one tick before onset: T1 is the first tick
  // that already moved, and an instantaneous lead step completes before it.
  const int m0 = std::max(m1 - 1, 0);

  LinearIndexResult out;
  out.dv_target = y[m2] - y[m0];
  out.dv_lead = v_lead[m2] - v_lead[m0];
  if (std::abs(out.dv_lead) < kDvLeadFloor) {
    throw MetricError("lead speed change below the 0.1 m/s floor; index undefined");
  }
  out.index = (std::abs(out.dv_target) - std::abs(out.dv_lead)) / std::abs(out.dv_lead);

  if (params.k_v && params.headway) {
    // Bound form from the derivation: time averages of |v_lead - v_target|
    // and of the tracking error |v_target - v_ego| against the mean lead
    // acceleration. The averages run at control resolution over the same
    // span as the endpoint deltas, (m0, m2], which is what makes the
    // spacing identity behind the bound exact on the integrated trace.
    const int spp = steps_per_plan(trace);
    double sum_vrel = 0.0, sum_e = 0.0;
    int count = 0;
    for (int k = m0 * spp + 1; k <= m2 * spp; ++k) {
      const TickRecord& r = trace.at(k, vehicle);
      const double y_held = r.v_target ? *r.v_target : *r.v_pid;
      sum_vrel += std::abs(y_held - trace.at(k, vehicle - 1).state.v);
      sum_e += std::abs(y_held - r.state.v);
      ++count;
    }
    const double a_lead_mean = std::abs(out.dv_lead) / (count * trace.timing.control_dt);
    out.bound = *params.k_v * ((sum_vrel / count + sum_e / count) / a_lead_mean -
                               *params.headway);
  }
  return out;
}

double mpc_ss_index(const PlatoonTrace& trace, int vehicle,
                    const ResponseWindow& window) {
  check_vehicle(trace, vehicle);
  const std::vector<double> a_t = plan_atarget_series(trace, vehicle);
  const std::vector<double> v_lead = plan_speed_series(trace, vehicle - 1);
  const auto [m1, m2] = window_plan_indices(trace, window, static_cast<int>(a_t.size()));
  const double dv_lead = std::abs(v_lead[m2] - v_lead[std::max(m1 - 1, 0)]);
  if (dv_lead < kDvLeadFloor) {
    throw MetricError("lead speed change below the 0.1 m/s floor; index undefined");
  }
  const double dt_hat = trace.timing.plan_dt;
  const double r = dt_hat / trace.timing.horizon_dt;

  // Geometric |a_start| response driven by |a_target|, replayed from the
  // trace start so the window carries the correct memory.
  double a_abs = std::abs(astart_seed(trace, vehicle, r, a_t));
  double sum = 0.0;
  for (int m = 0; m <= m2; ++m) {
    a_abs += r * (std::abs(a_t[m]) - a_abs);
    if (m > m1) sum += dt_hat * (std::abs(a_t[m]) + a_abs) / 2.0;
  }
  return -1.0 + sum / dv_lead;
}

double mpc_vstart_change(const PlatoonTrace& trace, int vehicle,
                         const ResponseWindow& window) {
  check_vehicle(trace, vehicle);
  const std::vector<double> a_t = plan_atarget_series(trace, vehicle);
  const auto [m1, m2] = window_plan_indices(trace, window, static_cast<int>(a_t.size()));
  const double dt_hat = trace.timing.plan_dt;
  const double r = dt_hat / trace.timing.horizon_dt;

  double a_start = astart_seed(trace, vehicle, r, a_t);
  double dv = 0.0;
  for (int m = 0; m <= m2; ++m) {
    a_start += r * (a_t[m] - a_start);
    if (m > m1) dv += dt_hat * (a_t[m] + a_start) / 2.0;
  }
  return dv;
}

double amplification_ratio(const PlatoonTrace& trace, int upstream,
                           int downstream, const ResponseWindow& window) {
  check_vehicle(trace, upstream);
  check_vehicle(trace, downstream);
  const double t_end = window.t1 + window.dt;
  double up_min = std::numeric_limits<double>::infinity(), up_max = -up_min;
  double dn_min = up_min, dn_max = -up_min;
  for (int tick = 0; tick < trace.tick_count(); ++tick) {
    const double t = trace.at(tick, 0).t;
    if (t < window.t1 || t > t_end) continue;
    const double vu = trace.at(tick, upstream).state.v;
    const double vd = trace.at(tick, downstream).state.v;
    up_min = std::min(up_min, vu);
    up_max = std::max(up_max, vu);
    dn_min = std::min(dn_min, vd);
    dn_max = std::max(dn_max, vd);
  }
  const double up_exc = up_max - up_min;
  if (!(up_exc > 1e-9)) {
    throw MetricError("upstream speed excursion is zero; ratio undefined");
  }
  return (dn_max - dn_min) / up_exc;
}

double transfer_gain(double k_v, double headway, double omega) {
  const double num = std::hypot((1.0 - k_v * headway) * omega, k_v);
  const double den = std::hypot(omega, k_v);
  return num / den;
}

std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> out;
  out.reserve(points);
  const double l0 = std::log10(lo), l1 = std::log10(hi);
  for (int i = 0; i < points; ++i) {
    const double f = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    out.push_back(std::pow(10.0, l0 + f * (l1 - l0)));
  }
  return out;
}

HinfResult hinf_check(double k_v, double headway, std::span<const double> omega_grid) {
  HinfResult r;
  for (double w : omega_grid) {
    r.sup_gain = std::max(r.sup_gain, transfer_gain(k_v, headway, w));
  }
  r.satisfied = r.sup_gain <= 1.0 + 1e-9;
  return r;
}

double default_event_time(const PlatoonTrace& trace) {
  for (int tick = 0; tick < trace.tick_count(); ++tick) {
    const TickRecord& r = trace.at(tick, 0);
    if (std::abs(r.state.a) > 0.1) return r.t;
  }
  return 0.0;
}

std::optional<ResponseWindow> platoon_response_window(const PlatoonTrace& trace,
                                                      double event_time,
                                                      const WindowParams& params) {
  std::optional<ResponseWindow> wide;
  for (int v = 1; v < trace.vehicle_count; ++v) {
    const auto w = detect_response_window(trace, v, event_time, params);
    if (!w) continue;
    if (!wide) {
      wide = w;
    } else {
      const double end = std::max(wide->t1 + wide->dt, w->t1 + w->dt);
      wide->t1 = std::min(wide->t1, w->t1);
      wide->dt = end - wide->t1;
    }
  }
  if (wide) {
    // Pull the start back one plan tick so the upstream pre-event level is
    // inside the window (an instantaneous lead step completes before T1).
    const double back = std::min(trace.timing.plan_dt, wide->t1);
    wide->t1 -= back;
    wide->dt += back;
  }
  return wide;
}

std::string analyze_trace_report(const PlatoonTrace& trace, const AnalyzeOptions& options) {
  using json = nlohmann::ordered_json;
  json rep;
  switch (trace.status) {
    case RunStatus::kOk: rep["status"] = "ok"; break;
    case RunStatus::kCollision: rep["status"] = "collision"; break;
    case RunStatus::kNan: rep["status"] = "nan"; break;
  }
  if (trace.fail_tick >= 0) rep["fail_tick"] = trace.fail_tick;

  const int vehicle = options.vehicle < 0 ? trace.vehicle_count - 1 : options.vehicle;
  rep["vehicle"] = vehicle;

  const double event = options.event_time.value_or(default_event_time(trace));
  rep["event_time"] = event;

  const auto window = detect_response_window(trace, vehicle, event, options.window);
  if (!window) {
    rep["window"] = nullptr;
  } else {
    rep["window"] = json{{"t1", window->t1}, {"dt", window->dt}};
    try {
      if (options.mpc) {
        rep["index"] = json{{"type", "I_mpc"},
                            {"value", mpc_ss_index(trace, vehicle, *window)}};
      } else {
        LinearIndexParams p;
        p.k_v = options.k_v;
        p.headway = options.headway;
        const LinearIndexResult r = linear_ss_index(trace, vehicle, *window, p);
        json idx{{"type", "I_linear"},
                 {"value", r.index},
                 {"dv_target", r.dv_target},
                 {"dv_lead", r.dv_lead}};
        if (r.bound) idx["bound"] = *r.bound;
        rep["index"] = idx;
      }
    } catch (const MetricError& e) {
      rep["index"] = json{{"error", e.what()}};
    }

    // Pairwise damping down the platoon. Ratios need every vehicle's full
    // response, including late swings of a string-unstable tail, so they
    // run from the event to the end of the trace.
    const ResponseWindow wide{event, trace.timing.duration - event};
    json amps = json::array();
    for (int v = 1; v < trace.vehicle_count; ++v) {
      json entry{{"upstream", v - 1}, {"downstream", v}};
      try {
        entry["ratio"] = amplification_ratio(trace, v - 1, v, wide);
      } catch (const MetricError& e) {
        entry["error"] = e.what();
      }
      amps.push_back(entry);
    }
    rep["amplification"] = amps;
    rep["amplification_window"] = json{{"t1", wide.t1}, {"dt", wide.dt}};
  }

  if (options.k_v && options.headway) {
    const auto grid = log_grid(1e-3, 1e2, 1000);
    const HinfResult h = hinf_check(*options.k_v, *options.headway, grid);
    rep["hinf"] = json{{"k_v", *options.k_v},
                       {"headway", *options.headway},
                       {"sup_gain", h.sup_gain},
                       {"satisfied", h.satisfied}};
  }
  return rep.dump(2) + "\n";
}

}  // namespace accsim

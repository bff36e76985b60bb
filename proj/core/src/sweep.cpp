#include "accsim/sweep.hpp"

#include <atomic>
#include <cstdio>
#include <future>
#include <thread>

#include <json.hpp>

#include "accsim/sim_engine.hpp"

namespace accsim {

using json = nlohmann::ordered_json;

namespace {

struct PathToken {
  std::string key;
  int index = -1;      // >= 0: fixed array element
  bool wildcard = false;  // key[*]
};

std::vector<PathToken> parse_path(const std::string& path) {
  if (path.empty()) throw ScenarioError("parameter path is empty");
  std::vector<PathToken> tokens;
  std::size_t start = 0;
  while (start <= path.size()) {
    std::size_t end = path.find('.', start);
    std::string part = path.substr(start, end == std::string::npos ? end : end - start);
    if (part.empty()) throw ScenarioError("parameter path '" + path + "' has an empty segment");
    PathToken tok;
    const std::size_t br = part.find('[');
    if (br != std::string::npos) {
      if (part.back() != ']') throw ScenarioError("parameter path '" + path + "': malformed [index]");
      const std::string idx = part.substr(br + 1, part.size() - br - 2);
      tok.key = part.substr(0, br);
      if (idx == "*") {
        tok.wildcard = true;
      } else {
        try {
          tok.index = std::stoi(idx);
        } catch (const std::exception&) {
          throw ScenarioError("parameter path '" + path + "': bad array index '" + idx + "'");
        }
        if (tok.index < 0) throw ScenarioError("parameter path '" + path + "': negative index");
      }
    } else {
      tok.key = part;
    }
    tokens.push_back(std::move(tok));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return tokens;
}

void set_numeric(json& node, std::span<const PathToken> tokens, double value,
                 const std::string& full) {
  if (tokens.empty()) {
    if (!node.is_number()) {
      throw ScenarioError("parameter path '" + full + "' does not address a numeric field");
    }
    node = value;
    return;
  }
  const PathToken& tok = tokens.front();
  if (!node.is_object() || !node.contains(tok.key)) {
    throw ScenarioError("parameter path '" + full + "': no field '" + tok.key + "'");
  }
  json& child = node.at(tok.key);
  if (tok.wildcard || tok.index >= 0) {
    if (!child.is_array()) {
      throw ScenarioError("parameter path '" + full + "': '" + tok.key + "' is not an array");
    }
    if (tok.wildcard) {
      if (child.empty()) throw ScenarioError("parameter path '" + full + "': empty array under '" + tok.key + "'");
      for (json& e : child) set_numeric(e, tokens.subspan(1), value, full);
    } else {
      if (tok.index >= static_cast<int>(child.size())) {
        throw ScenarioError("parameter path '" + full + "': index " +
                            std::to_string(tok.index) + " out of range");
      }
      set_numeric(child[tok.index], tokens.subspan(1), value, full);
    }
  } else {
    set_numeric(child, tokens.subspan(1), value, full);
  }
}

SweepRow analyze_run(const Scenario& scenario, double value, const WindowParams& wp) {
  SweepRow row;
  row.value = value;
  const PlatoonTrace trace = run_platoon(scenario);
  switch (trace.status) {
    case RunStatus::kOk: row.status = "ok"; break;
    case RunStatus::kCollision: row.status = "collision"; break;
    case RunStatus::kNan: row.status = "nan"; break;
  }
  const double event = default_event_time(trace);
  const int last = trace.vehicle_count - 1;
  const auto wide = platoon_response_window(trace, event, wp);
  if (!wide) return row;
  try {
    if (scenario.vehicles.back().uses_mpc()) {
      row.index = mpc_ss_index(trace, last, *wide);
    } else {
      const auto own = detect_response_window(trace, last, event, wp);
      row.index = linear_ss_index(trace, last, own.value_or(*wide)).index;
    }
  } catch (const MetricError& e) {
    row.error = e.what();
  }
  try {
    // Ratios compare across runs, so they need a window independent of each
    // run's detected transient: everything from the event onward.
    const ResponseWindow span{event, trace.timing.duration - event};
    row.amp_last_pair = amplification_ratio(trace, last - 1, last, span);
    if (last > 1) row.amp_end_to_end = amplification_ratio(trace, 0, last, span);
  } catch (const MetricError& e) {
    if (row.error.empty()) row.error = e.what();
  }
  return row;
}

}  // namespace

Scenario patch_scenario(const Scenario& base, const std::string& param_path,
                        double value) {
  const auto tokens = parse_path(param_path);
  json doc = json::parse(serialize_scenario(base));
  set_numeric(doc, tokens, value, param_path);
  return parse_scenario(doc.dump());
}

SweepSummary run_sweep(const Scenario& base, const std::string& param_path,
                       std::span<const double> values, int jobs,
                       const WindowParams& window) {
  SweepSummary summary;
  summary.param = param_path;
  summary.rows.resize(values.size());
  if (values.empty()) return summary;

  // Resolve the path once up front so a bad path fails the whole sweep
  // instead of every row.
  patch_scenario(base, param_path, values[0]);

  const int workers = std::clamp(jobs, 1, static_cast<int>(values.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= values.size()) return;
      SweepRow& row = summary.rows[i];
      try {
        const Scenario patched = patch_scenario(base, param_path, values[i]);
        row = analyze_run(patched, values[i], window);
      } catch (const std::exception& e) {
        row.value = values[i];
        row.status = "error";
        row.error = e.what();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::future<void>> futs;
    futs.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      futs.push_back(std::async(std::launch::async, work));
    }
    for (auto& f : futs) f.get();
  }
  return summary;
}

std::string sweep_summary_csv(const SweepSummary& summary) {
  std::string out = "value,status,ss_index,amp_last_pair,amp_end_to_end,collision\n";
  char buf[64];
  const auto append = [&](const std::optional<double>& v) {
    out += ',';
    if (v) {
      std::snprintf(buf, sizeof buf, "%.12g", *v);
      out += buf;
    }
  };
  for (const SweepRow& r : summary.rows) {
    std::snprintf(buf, sizeof buf, "%.12g", r.value);
    out += buf;
    out += ',';
    out += r.status;
    append(r.index);
    append(r.amp_last_pair);
    append(r.amp_end_to_end);
    out += ',';
    out += (r.status == "collision") ? "1" : "0";
    out += '\n';
  }
  return out;
}

}  // namespace accsim

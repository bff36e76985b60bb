// Command-line front end: simulate scenarios, analyze traces, sweep
// parameters, and dump the closed-form frequency response.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "accsim/scenario.hpp"
#include "accsim/sim_engine.hpp"
#include "accsim/ss_metrics.hpp"
#include "accsim/svg_chart.hpp"
#include "accsim/sweep.hpp"
#include "accsim/trace.hpp"

namespace fs = std::filesystem;

namespace {

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

const char* status_name(accsim::RunStatus s) {
  switch (s) {
    case accsim::RunStatus::kOk: return "ok";
    case accsim::RunStatus::kCollision: return "collision";
    case accsim::RunStatus::kNan: return "nan";
  }
  return "?";
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed, bool svg) {
  std::vector<std::string> warnings;
  accsim::Scenario scenario = accsim::load_scenario(scenario_path, &warnings);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
  if (seed) scenario.noise.seed = *seed;

  const accsim::PlatoonTrace trace = accsim::run_platoon(scenario);

  fs::create_directories(out_dir);
  const fs::path trace_path = fs::path(out_dir) / "trace.csv";
  accsim::write_trace_csv(trace, trace_path);
  if (svg) {
    write_text_file(fs::path(out_dir) / "speed.svg", accsim::render_speed_chart(trace));
    write_text_file(fs::path(out_dir) / "spacing.svg", accsim::render_spacing_chart(trace));
  }

  std::cout << "status: " << status_name(trace.status) << "\n"
            << "ticks: " << trace.tick_count() << "\n"
            << "vehicles: " << trace.vehicle_count << "\n"
            << "trace: " << trace_path.string() << "\n";
  if (trace.fail_tick >= 0) std::cout << "fail_tick: " << trace.fail_tick << "\n";
  return trace.status == accsim::RunStatus::kOk ? 0 : 1;
}

int cmd_analyze(const std::string& trace_path, const std::string& planner,
                const std::string& report_path, int vehicle,
                std::optional<double> event_time, double plan_dt, double horizon_dt,
                std::optional<double> kv, std::optional<double> ht) {
  const accsim::PlatoonTrace trace =
      accsim::read_trace_csv(fs::path(trace_path), plan_dt, horizon_dt);
  accsim::AnalyzeOptions opt;
  opt.mpc = planner == "mpc";
  opt.vehicle = vehicle;
  opt.event_time = event_time;
  opt.k_v = kv;
  opt.headway = ht;
  const std::string report = accsim::analyze_trace_report(trace, opt);
  if (report_path.empty()) {
    std::cout << report;
  } else {
    write_text_file(report_path, report);
  }
  return 0;
}

int cmd_sweep(const std::string& scenario_path, const std::string& param,
              const std::vector<double>& values, int jobs, const std::string& out_path) {
  std::vector<std::string> warnings;
  const accsim::Scenario base = accsim::load_scenario(scenario_path, &warnings);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";

  const accsim::SweepSummary summary = accsim::run_sweep(base, param, values, jobs);
  const std::string csv = accsim::sweep_summary_csv(summary);
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    write_text_file(out_path, csv);
  }
  for (const accsim::SweepRow& r : summary.rows) {
    if (!r.error.empty()) std::cerr << "value " << r.value << ": " << r.error << "\n";
  }
  return summary.all_ok() ? 0 : 1;
}

int cmd_bode(double kv, double ht, double omega_min, double omega_max, int points,
             const std::string& out_path) {
  const std::vector<double> grid = accsim::log_grid(omega_min, omega_max, points);
  std::string csv = "omega,gain\n";
  char buf[80];
  for (double w : grid) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", w,
                  accsim::transfer_gain(kv, ht, w));
    csv += buf;
  }
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    write_text_file(out_path, csv);
  }
  const accsim::HinfResult h = accsim::hinf_check(kv, ht, grid);
  std::cerr << "sup_gain: " << h.sup_gain
            << "  string_stable: " << (h.satisfied ? "yes" : "no") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-rate ACC platoon simulator and string-stability analyzer"};
  app.require_subcommand(1);

  // simulate
  std::string sim_scenario, sim_out = "out";
  std::optional<std::uint64_t> sim_seed;
  bool sim_svg = false;
  CLI::App* sim = app.add_subcommand("simulate", "run a scenario and write its trace");
  sim->add_option("--scenario", sim_scenario, "scenario JSON file")->required();
  sim->add_option("--out", sim_out, "output directory");
  sim->add_option("--seed", sim_seed, "override the scenario noise seed");
  sim->add_flag("--svg", sim_svg, "also emit speed/spacing SVG charts");

  // analyze
  std::string an_trace, an_planner, an_report;
  int an_vehicle = -1;
  std::optional<double> an_event, an_kv, an_ht;
  double an_plan_dt = 0.05, an_horizon_dt = 0.2;
  CLI::App* an = app.add_subcommand("analyze", "string-stability report for a trace CSV");
  an->add_option("--trace", an_trace, "trace CSV file")->required();
  an->add_option("--planner", an_planner, "which index to compute")
      ->required()
      ->check(CLI::IsMember({"linear", "mpc"}));
  an->add_option("--report", an_report, "write the JSON report here (default stdout)");
  an->add_option("--vehicle", an_vehicle, "vehicle id to index (default: last)");
  an->add_option("--event-time", an_event, "lead perturbation time (default: detected)");
  an->add_option("--plan-dt", an_plan_dt, "planner period of the recorded run [s]");
  an->add_option("--horizon-dt", an_horizon_dt, "MPC horizon step of the recorded run [s]");
  an->add_option("--kv", an_kv, "planner spacing gain (enables bound + h-inf)");
  an->add_option("--ht", an_ht, "planner time headway (enables bound + h-inf)");

  // sweep
  std::string sw_scenario, sw_param, sw_out;
  std::vector<double> sw_values;
  int sw_jobs = 1;
  CLI::App* sw = app.add_subcommand("sweep", "repeat a scenario over parameter values");
  sw->add_option("--scenario", sw_scenario, "base scenario JSON file")->required();
  sw->add_option("--param", sw_param, "dotted path of the numeric field to sweep")->required();
  sw->add_option("--values", sw_values, "comma-separated values")
      ->required()
      ->delimiter(',');
  sw->add_option("--jobs", sw_jobs, "parallel runs")->check(CLI::PositiveNumber);
  sw->add_option("--out", sw_out, "write the summary CSV here (default stdout)");

  // bode
  double bo_kv = 0.0, bo_ht = 0.0, bo_min = 1e-3, bo_max = 1e2;
  int bo_points = 1000;
  std::string bo_out;
  CLI::App* bo = app.add_subcommand("bode", "closed-form planner frequency response");
  bo->add_option("--kv", bo_kv, "spacing gain [1/s]")->required();
  bo->add_option("--ht", bo_ht, "time headway [s]")->required();
  bo->add_option("--omega-min", bo_min, "grid start [rad/s]");
  bo->add_option("--omega-max", bo_max, "grid end [rad/s]");
  bo->add_option("--points", bo_points, "grid size")->check(CLI::PositiveNumber);
  bo->add_option("--out", bo_out, "write the CSV here (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(sim_scenario, sim_out, sim_seed, sim_svg);
    if (an->parsed()) {
      return cmd_analyze(an_trace, an_planner, an_report, an_vehicle, an_event,
                         an_plan_dt, an_horizon_dt, an_kv, an_ht);
    }
    if (sw->parsed()) return cmd_sweep(sw_scenario, sw_param, sw_values, sw_jobs, sw_out);
    if (bo->parsed()) return cmd_bode(bo_kv, bo_ht, bo_min, bo_max, bo_points, bo_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

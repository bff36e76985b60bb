#include <benchmark/benchmark.h>

#include "accsim/linear_planner.hpp"
#include "accsim/mpc_planner.hpp"
#include "accsim/scenario.hpp"
#include "accsim/sim_engine.hpp"
#include "accsim/ss_metrics.hpp"

namespace {

accsim::Scenario linear_platoon(int followers, double duration) {
  accsim::Scenario sc;
  sc.timing.duration = duration;
  sc.lead_initial_speed = 20.0;
  sc.lead_profile.kind = accsim::LeadProfileKind::kStep;
  sc.lead_profile.step_time = 5.0;
  sc.lead_profile.step_delta = -3.0;
  for (int i = 0; i < followers; ++i) {
    accsim::VehicleSpec v;
    v.planner = accsim::LinearPlannerParams{};
    v.controller.kp = accsim::GainSchedule(1.0);
    v.controller.ki = accsim::GainSchedule(0.33);
    sc.vehicles.push_back(v);
  }
  return sc;
}

accsim::Scenario mpc_platoon(int followers, double duration) {
  accsim::Scenario sc = linear_platoon(followers, duration);
  for (auto& v : sc.vehicles) v.planner = accsim::MpcParams{};
  return sc;
}

void BM_RunPlatoonLinear(benchmark::State& state) {
  const accsim::Scenario sc = linear_platoon(static_cast<int>(state.range(0)), 30.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(accsim::run_platoon(sc));
  }
}
BENCHMARK(BM_RunPlatoonLinear)->Arg(1)->Arg(4)->Arg(8);

void BM_RunPlatoonMpc(benchmark::State& state) {
  const accsim::Scenario sc = mpc_platoon(static_cast<int>(state.range(0)), 10.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(accsim::run_platoon(sc));
  }
}
BENCHMARK(BM_RunPlatoonMpc)->Arg(1)->Arg(4);

void BM_SolveMpc(benchmark::State& state) {
  accsim::MpcParams p;
  accsim::TimingConfig timing;
  accsim::VehicleState ego{0.0, 18.0, 0.0};
  accsim::VehicleState lead{40.0, 15.0, -1.0};
  std::vector<double> prev(timing.horizon_steps(), 0.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(accsim::solve_mpc(ego, lead, prev, 0.0, p, timing));
  }
}
BENCHMARK(BM_SolveMpc);

void BM_HinfCheck(benchmark::State& state) {
  const std::vector<double> grid = accsim::log_grid(1e-3, 1e2, 1000);
  for (auto _ : state) {
    benchmark::DoNotOptimize(accsim::hinf_check(0.5, 1.5, grid));
  }
}
BENCHMARK(BM_HinfCheck);

}  // namespace

BENCHMARK_MAIN();

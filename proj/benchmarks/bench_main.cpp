#include <benchmark/benchmark.h>

#include "ehsim/circuit.hpp"
#include "ehsim/engine.hpp"
#include "ehsim/harvest.hpp"
#include "ehsim/load_profile.hpp"
#include "ehsim/planner.hpp"

namespace {

ehsim::CircuitParams circuit() {
    ehsim::CircuitParams p;
    p.capacitance = 0.4;
    p.leakage_resistance = 1e6;
    p.v_on = 3.1;
    p.v_off = 2.8;
    return p;
}

ehsim::ScenarioConfig scenario(double lux, double sleep_time, double horizon) {
    ehsim::ScenarioConfig c;
    c.circuit = circuit();
    c.harvest = ehsim::HarvestModel::table_one_oracle();
    c.load = ehsim::LoadProfile::table_one();
    c.illumination = ehsim::IlluminationProfile::constant(lux, horizon);
    c.initial_voltage = 3.3;
    c.sleep_time = sleep_time;
    return c;
}

void BM_ClosedFormOnDisconnected(benchmark::State& state) {
    const auto p = circuit();
    double t = 0.26;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ehsim::v_on_disconnected(3.3, t, 0.024915, p));
        t = t < 1.0 ? t + 1e-6 : 0.26;
    }
}
BENCHMARK(BM_ClosedFormOnDisconnected);

void BM_TimeToVoltage(benchmark::State& state) {
    const auto p = circuit();
    const ehsim::CircuitMode mode{true, true};
    for (auto _ : state) {
        benchmark::DoNotOptimize(ehsim::time_to_voltage(mode, 3.0, 3.3, 6.6e-4, 2.31e-4, p, true));
    }
}
BENCHMARK(BM_TimeToVoltage);

void BM_Rk4Oracle(benchmark::State& state) {
    const auto p = circuit();
    const auto steps = static_cast<double>(state.range(0));
    const ehsim::CircuitMode mode{true, true};
    for (auto _ : state) {
        benchmark::DoNotOptimize(ehsim::rk4_oracle(mode, 3.0, 100.0, 100.0 / steps, 6.6e-4, 2.31e-4, p));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Rk4Oracle)->Arg(1000)->Arg(10000);

void BM_SolveSleepTime(benchmark::State& state) {
    const auto profile = ehsim::LoadProfile::table_one();
    for (auto _ : state) benchmark::DoNotOptimize(ehsim::solve_sleep_time(6.592e-4, profile));
}
BENCHMARK(BM_SolveSleepTime);

// Simulated seconds per wall-clock second for the 700 lx schedule.
void BM_Simulate(benchmark::State& state) {
    const double horizon = static_cast<double>(state.range(0));
    const auto config = scenario(700.0, 18.10, horizon);
    for (auto _ : state) benchmark::DoNotOptimize(ehsim::run(config));
    state.counters["sim_s"] = benchmark::Counter(horizon * static_cast<double>(state.iterations()),
                                                 benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Simulate)->Arg(800)->Arg(28800)->Unit(benchmark::kMillisecond);

void BM_Sweep(benchmark::State& state) {
    std::vector<ehsim::ScenarioConfig> configs;
    for (double lux : {600.0, 700.0, 800.0}) {
        for (double t_s : {209.9, 42.44, 18.10}) configs.push_back(scenario(lux, t_s, 800.0));
    }
    for (auto _ : state) benchmark::DoNotOptimize(ehsim::sweep(configs));
}
BENCHMARK(BM_Sweep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

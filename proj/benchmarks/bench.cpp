#include <benchmark/benchmark.h>

#include "iesp/default_rules.hpp"
#include "iesp/plant.hpp"
#include "iesp/scenario.hpp"
#include "iesp/simulation.hpp"

using namespace iesp;
using namespace iesp::rules;

static void BM_DeltaMyawEvaluate(benchmark::State& state) {
    const auto rules = default_delta_m_yaw();
    double e_beta = -0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(rules.evaluate(e_beta, 0.05));
        e_beta = e_beta > 0.1 ? -0.1 : e_beta + 1e-4;
    }
}
BENCHMARK(BM_DeltaMyawEvaluate);

static void BM_PlantEvaluate(benchmark::State& state) {
    const vehicle::VehicleParameters p;
    const vehicle::Plant plant(p, {});
    auto s = vehicle::rest_state(p, 0.0, 0.0, 0.0, 25.0);
    s.angular_rate.z = 0.2;
    s.velocity.y = 0.4;
    vehicle::refresh_suspension(s, p);
    vehicle::ActuationSet u;
    u.steer = 0.03;
    u.throttle = 0.2;
    for (auto _ : state)
        benchmark::DoNotOptimize(plant.evaluate(s, u, 1.0));
}
BENCHMARK(BM_PlantEvaluate);

static void BM_BendBurstRun(benchmark::State& state) {
    auto j = sim::read_json_file(std::filesystem::path(IESP_DATA_DIR) / "scenarios" / "bend_burst_rear_right.json");
    j["duration_s"] = static_cast<double>(state.range(0));
    j["burst"]["time_s"] = 0.5 * static_cast<double>(state.range(0));
    const auto sc = sim::scenario_from_json(j);
    for (auto _ : state)
        benchmark::DoNotOptimize(sim::run(sc));
    state.SetLabel("simulated seconds = " + std::to_string(state.range(0)));
}
BENCHMARK(BM_BendBurstRun)->Arg(2)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

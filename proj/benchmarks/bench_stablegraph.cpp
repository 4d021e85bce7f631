#include <wildram/stablegraph.hpp>

#include <benchmark/benchmark.h>
#include <nlohmann/json.hpp>

using namespace wildram;

namespace {

// a realized star covers graph construction plus every structural invariant,
// so the whole validate pipeline is exercised without file input
StableGraph star() {
    auto configs = enumerate_tail_configs(5, 2, 2);
    return realize_star(5, 2, configs.front());
}

void ValidateStar(benchmark::State& state) {
    StableGraph g = star();
    for (auto _ : state) benchmark::DoNotOptimize(validate(g));
}
BENCHMARK(ValidateStar);

void GlobalAndGeneralized(benchmark::State& state) {
    StableGraph g = star();
    for (auto _ : state) {
        benchmark::DoNotOptimize(check_global(g));
        benchmark::DoNotOptimize(check_generalized(g, 0));
    }
}
BENCHMARK(GlobalAndGeneralized);

void EnumerateConfigs(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(enumerate_tail_configs(7, 6, 1));
}
BENCHMARK(EnumerateConfigs);

void SerializeRoundTrip(benchmark::State& state) {
    StableGraph g = star();
    for (auto _ : state) benchmark::DoNotOptimize(graph_from_json(graph_to_json(g)));
}
BENCHMARK(SerializeRoundTrip);

} // namespace

BENCHMARK_MAIN();

#include <wildram/groups.hpp>

#include <benchmark/benchmark.h>

using namespace wildram;

namespace {

void SylowBruteSl2(benchmark::State& state) {
    GroupSpec spec = GroupSpec::parse("sl2 q=11"); // order 1320, enumerated fully
    for (auto _ : state)
        benchmark::DoNotOptimize(sylow_analyze(spec, 5, SylowMethod::Brute));
}
BENCHMARK(SylowBruteSl2);

void SylowStructuralSl2(benchmark::State& state) {
    GroupSpec spec = GroupSpec::parse("sl2 q=251"); // order 15813000, shortcut only
    for (auto _ : state)
        benchmark::DoNotOptimize(sylow_analyze(spec, 5, SylowMethod::Structural));
}
BENCHMARK(SylowStructuralSl2);

void TripleSearch(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(find_sl2_triple(251, {251, 250, 50}));
}
BENCHMARK(TripleSearch);

void QuotientShape(benchmark::State& state) {
    GroupSpec spec = GroupSpec::parse("semidirect 5 4 action=2");
    for (auto _ : state) benchmark::DoNotOptimize(quotient_structure(spec, 5));
}
BENCHMARK(QuotientShape);

} // namespace

BENCHMARK_MAIN();

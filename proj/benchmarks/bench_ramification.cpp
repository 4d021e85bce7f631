#include <wildram/ramification.hpp>

#include <benchmark/benchmark.h>

using namespace wildram;

namespace {

// five jumps with gaps divisible by growing powers of p, the deepest shape
// the toolkit routinely handles
RamFiltration deep_filtration() {
    RamFiltration f;
    f.p = 7;
    f.n = 5;
    f.m = 3;
    Int j = 2;
    Int scale = 7;
    for (int i = 0; i < f.n; ++i) {
        f.lower_jumps.push_back(j);
        j += scale * (i + 3);
        scale *= 7;
    }
    return f;
}

void RoundTrip(benchmark::State& state) {
    RamFiltration f = deep_filtration();
    for (auto _ : state) {
        RamFiltration back = upper_to_lower(f.p, f.n, f.m, lower_to_upper(f));
        benchmark::DoNotOptimize(back);
    }
}
BENCHMARK(RoundTrip);

void ConductorBothWays(benchmark::State& state) {
    RamFiltration f = deep_filtration();
    for (auto _ : state) {
        Rat a = conductor(f);
        Rat b = conductor_weighted(f);
        benchmark::DoNotOptimize(a);
        benchmark::DoNotOptimize(b);
    }
}
BENCHMARK(ConductorBothWays);

void EffectiveInvariant(benchmark::State& state) {
    std::vector<Rat> sigmas = {Rat(1, 2), Rat(3, 2), Rat(7, 2), Rat(19, 2)};
    for (auto _ : state) {
        for (int alpha = 0; alpha < 4; ++alpha)
            benchmark::DoNotOptimize(effective_invariant(5, sigmas, alpha));
    }
}
BENCHMARK(EffectiveInvariant);

} // namespace

BENCHMARK_MAIN();

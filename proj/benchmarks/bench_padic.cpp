#include <wildram/padic.hpp>

#include <benchmark/benchmark.h>

using namespace wildram;

namespace {

void TruncatedArithmetic(benchmark::State& state) {
    EisensteinElem x = EisensteinElem::from_rational(5, 5, Rat(7, 3), 40);
    EisensteinElem y = EisensteinElem::from_rational(5, 5, Rat(-11, 13), 40);
    for (auto _ : state) {
        EisensteinElem z = x * y + x;
        benchmark::DoNotOptimize(z);
    }
}
BENCHMARK(TruncatedArithmetic);

void UnitInverse(benchmark::State& state) {
    EisensteinElem x = EisensteinElem::from_rational(5, 5, Rat(7, 3), 40);
    for (auto _ : state) benchmark::DoNotOptimize(x.inv());
}
BENCHMARK(UnitInverse);

void FifthRoot(benchmark::State& state) {
    EisensteinElem x = EisensteinElem::from_rational(5, 5, Rat(2), 30) +
                       EisensteinElem::from_exact(EisExact::pi(5, 5), 30);
    EisensteinElem pow = x.pow(Int(5));
    for (auto _ : state) benchmark::DoNotOptimize(nth_root(pow, 5));
}
BENCHMARK(FifthRoot);

void WorkedEvaluation(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(run_worked_example(2, 5));
}
BENCHMARK(WorkedEvaluation);

} // namespace

BENCHMARK_MAIN();

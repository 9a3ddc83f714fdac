#include <benchmark/benchmark.h>

#include "tailex/estimation.hpp"
#include "tailex/rng.hpp"
#include "tailex/simulation.hpp"

using namespace tailex;

namespace {

SampleMatrix make_sample(std::size_t n) {
    const std::vector<Margin> ms{Margin::pareto(2.0, 10.0),
                                 Margin::pareto(2.0, 15.0)};
    return draw_sample(ms, Dependence::independent, n, 4242);
}

void BM_DrawSample(benchmark::State& state) {
    const std::vector<Margin> ms{Margin::pareto(2.0, 10.0),
                                 Margin::pareto(2.0, 15.0)};
    const std::size_t n = state.range(0);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            draw_sample(ms, Dependence::independent, n, 7));
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_DrawSample)->Arg(10000)->Arg(100000);

void BM_HillEstimator(benchmark::State& state) {
    const SampleMatrix s = make_sample(100000);
    std::vector<double> norms(s.n);
    for (std::size_t i = 0; i < s.n; ++i)
        norms[i] = s.at(i, 0) + s.at(i, 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(hill_estimator(norms, 1000));
}
BENCHMARK(BM_HillEstimator);

void BM_ExtremeExpectileEstimator(benchmark::State& state) {
    const SampleMatrix s = make_sample(100000);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            extreme_expectile_independent(s, 1000, 0.999));
}
BENCHMARK(BM_ExtremeExpectileEstimator);

} // namespace

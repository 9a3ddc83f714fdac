#include <benchmark/benchmark.h>

#include "tailex/asymptotics.hpp"
#include "tailex/expectile.hpp"

using namespace tailex;

namespace {

const std::vector<Margin> kPair{Margin::pareto(2.0, 10.0),
                                Margin::pareto(2.0, 15.0)};

void BM_UnivariateExpectile(benchmark::State& state) {
    const Margin m = Margin::pareto(2.0, 10.0);
    double alpha = 0.9;
    for (auto _ : state) {
        benchmark::DoNotOptimize(univariate_expectile(m, alpha));
        alpha = alpha > 0.9989 ? 0.9 : alpha + 1e-4;
    }
}
BENCHMARK(BM_UnivariateExpectile);

void BM_SolveIndependent(benchmark::State& state) {
    const ExpectileProblem p{kPair, WeightMatrix::all_ones(2),
                             Dependence::independent, 0.999};
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_multivariate_expectile(p));
}
BENCHMARK(BM_SolveIndependent);

void BM_SolveComonotonic(benchmark::State& state) {
    const ExpectileProblem p{kPair, WeightMatrix::all_ones(2),
                             Dependence::comonotonic, 0.999};
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_multivariate_expectile(p));
}
BENCHMARK(BM_SolveComonotonic);

void BM_IntegralLambdaArchimedean(benchmark::State& state) {
    const auto model = TailDependenceModel::archimedean(2.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            integral_lambda_tail(model, 2.0, 1.0, 1.0, 1.3, 1.0));
}
BENCHMARK(BM_IntegralLambdaArchimedean);

void BM_SolveLimitSystemArchimedean(benchmark::State& state) {
    const std::vector<double> c{1.0, 2.25, 0.7};
    const auto model = TailDependenceModel::archimedean(2.0);
    const auto init = limit_independent(2.0, c);
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_limit_system(2.0, c, model, init));
}
BENCHMARK(BM_SolveLimitSystemArchimedean);

} // namespace

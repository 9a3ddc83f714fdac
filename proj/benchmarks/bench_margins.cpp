#include <benchmark/benchmark.h>

#include "tailex/margins.hpp"

using tailex::Margin;

namespace {

const Margin kPareto = Margin::pareto(2.0, 10.0);
const Margin kBurr = Margin::burr(4.0, 10.0, 0.75);
const Margin kStudent = Margin::scaled_student(1.0, 2.0);
const Margin kStudent3 = Margin::scaled_student(1.0, 3.0);

void BM_ParetoSurvival(benchmark::State& state) {
    double x = 1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(kPareto.survival(x));
        x += 0.1;
    }
}
BENCHMARK(BM_ParetoSurvival);

void BM_BurrUpperPartialMoment(benchmark::State& state) {
    double x = 1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(kBurr.upper_partial_moment(x));
        x += 0.1;
    }
}
BENCHMARK(BM_BurrUpperPartialMoment);

void BM_StudentSurvival(benchmark::State& state) {
    double x = -3.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(kStudent3.survival(x));
        x = x > 40.0 ? -3.0 : x + 0.05;
    }
}
BENCHMARK(BM_StudentSurvival);

void BM_StudentQuantileClosedForm(benchmark::State& state) {
    double p = 0.001;
    for (auto _ : state) {
        benchmark::DoNotOptimize(kStudent.quantile(p)); // z=2 closed form
        p = p > 0.998 ? 0.001 : p + 0.001;
    }
}
BENCHMARK(BM_StudentQuantileClosedForm);

void BM_StudentQuantileNumeric(benchmark::State& state) {
    double p = 0.001;
    for (auto _ : state) {
        benchmark::DoNotOptimize(kStudent3.quantile(p)); // bisection+newton
        p = p > 0.998 ? 0.001 : p + 0.001;
    }
}
BENCHMARK(BM_StudentQuantileNumeric);

} // namespace

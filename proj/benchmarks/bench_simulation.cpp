#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "sysmdp/queue.hpp"
#include "sysmdp/simulation.hpp"
#include "sysmdp/stats.hpp"

using namespace sysmdp;
using namespace sysmdp::queue;

namespace {

// Cost per trajectory; the full study multiplies this by M and the number of cells.
void BM_SampleAverage(benchmark::State& state) {
    const QueueParams params;
    const auto policy = threshold_policy(17, params.N);
    SamplingOptions opt;
    opt.threads = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_performance(params, policy, PerformanceMetric::average(),
                                                    InitialDistribution::stationary, 16, 1, opt));
    }
    state.SetItemsProcessed(state.iterations() * 16);
}
BENCHMARK(BM_SampleAverage)->Unit(benchmark::kMillisecond);

void BM_SampleDiscounted(benchmark::State& state) {
    const QueueParams params;
    const auto policy = threshold_policy(17, params.N);
    SamplingOptions opt;
    opt.threads = 1;
    const double beta = state.range(0) == 0 ? 2e-3 : 4e-4;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_performance(params, policy, PerformanceMetric::discounted(beta),
                                                    InitialDistribution::uniform, 16, 1, opt));
    }
    state.SetItemsProcessed(state.iterations() * 16);
}
BENCHMARK(BM_SampleDiscounted)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Comparison(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = std::sin(0.37 * double(i)) * 10.0;
        y[i] = std::cos(0.11 * double(i)) * 10.0 + 0.1;
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(mann_whitney_u(x, y, Alternative::less));
        benchmark::DoNotOptimize(welch_t_test(x, y, Alternative::less));
        benchmark::DoNotOptimize(dagostino_k2(x));
    }
}
BENCHMARK(BM_Comparison)->Arg(5000);

}  // namespace

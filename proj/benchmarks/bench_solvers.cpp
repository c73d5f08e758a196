#include <benchmark/benchmark.h>

#include "sysmdp/chain.hpp"
#include "sysmdp/queue.hpp"
#include "sysmdp/random_mdp.hpp"
#include "sysmdp/solvers.hpp"

using namespace sysmdp;

namespace {

MdpModel random_model(std::size_t states) {
    RandomMdpSpec spec;
    spec.n_states = states;
    spec.n_actions = 4;
    spec.n_transient = states / 4;
    spec.seed = 11;
    return sample_random_mdp(spec);
}

void BM_EvaluateDiscounted(benchmark::State& state) {
    const auto m = random_model(static_cast<std::size_t>(state.range(0)));
    const auto pm = apply_policy(m, first_feasible_policy(m));
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_discounted(pm, 0.99));
}
BENCHMARK(BM_EvaluateDiscounted)->RangeMultiplier(4)->Range(8, 512);

void BM_EvaluateAverage(benchmark::State& state) {
    const auto m = random_model(static_cast<std::size_t>(state.range(0)));
    const auto pm = apply_policy(m, first_feasible_policy(m));
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_average(pm));
}
BENCHMARK(BM_EvaluateAverage)->RangeMultiplier(4)->Range(8, 512);

void BM_PolicyIterationDiscounted(benchmark::State& state) {
    const auto m = random_model(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(policy_iteration_discounted(m, 0.99));
}
BENCHMARK(BM_PolicyIterationDiscounted)->RangeMultiplier(4)->Range(8, 256);

void BM_PolicyIterationAverage(benchmark::State& state) {
    const auto m = random_model(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(policy_iteration_average(m));
}
BENCHMARK(BM_PolicyIterationAverage)->RangeMultiplier(4)->Range(8, 256);

void BM_StationaryDistribution(benchmark::State& state) {
    const auto m = random_model(static_cast<std::size_t>(state.range(0)));
    const auto pm = apply_policy(m, first_feasible_policy(m));
    for (auto _ : state) benchmark::DoNotOptimize(stationary_distribution(pm.transition));
}
BENCHMARK(BM_StationaryDistribution)->RangeMultiplier(4)->Range(8, 512);

void BM_QueueThresholds(benchmark::State& state) {
    queue::QueueParams params;
    params.beta = 2e-3;
    for (auto _ : state) {
        const auto avg = queue::build_queue_mdp(params, queue::Criterion::average);
        const auto disc = queue::build_queue_mdp(params, queue::Criterion::discounted);
        benchmark::DoNotOptimize(policy_iteration_average(avg.model));
        benchmark::DoNotOptimize(policy_iteration_discounted(disc.model, *disc.alpha));
    }
}
BENCHMARK(BM_QueueThresholds);

}  // namespace

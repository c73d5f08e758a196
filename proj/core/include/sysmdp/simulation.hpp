#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sysmdp/model.hpp"
#include "sysmdp/queue.hpp"
#include "sysmdp/stats.hpp"

namespace sysmdp::queue {

enum class Event { service = 0, arrival = 1 };

struct TrajectoryRecord {
    int state = 0;
    double dt = 0.0;
    Event event = Event::service;
    bool rejected = false;
};

struct Trajectory {
    std::vector<TrajectoryRecord> records;
    double total_time = 0.0;
};

/**
 * The CTMC sampling loop shared by trajectory recording and the streaming
 * cost estimators. `uniform()` must return variates on (0, 1]; each step
 * consumes one for the Exp(gamma) waiting time and one for the event type,
 * both by inverse transform. `sink(x, dt, event, rejected)` sees every step.
 *
 * A rejection is charged only on an arrival that the policy turns away.
 */
template <class Uniform, class Sink>
void run_ctmc(int x0, const Policy& policy, double horizon, Uniform& uniform, double lambda,
              double mu, Sink&& sink) {
    const double gamma = lambda + mu;
    const double p_service = mu / gamma;
    const int n_max = static_cast<int>(policy.size()) - 1;
    double clock = 0.0;
    int x = x0;
    while (clock < horizon) {
        const int a = policy[static_cast<std::size_t>(x)];
        const double dt = -std::log(uniform()) / gamma;
        const Event e = uniform() <= p_service ? Event::service : Event::arrival;
        int next;
        if (e == Event::service) {
            next = x > 0 ? x - 1 : 0;
        } else {
            next = a == kAccept ? std::min(x + 1, n_max) : x;
        }
        const bool rejected = e == Event::arrival && a == kReject;
        sink(x, dt, e, rejected);
        clock += dt;
        x = next;
    }
}

/// Records every step; throws std::invalid_argument if x0 is outside [0, N].
template <class Uniform>
Trajectory simulate_trajectory(int x0, const Policy& policy, double horizon, Uniform& uniform,
                               double lambda, double mu) {
    if (x0 < 0 || static_cast<std::size_t>(x0) >= policy.size()) {
        throw std::invalid_argument("initial state outside [0, N]");
    }
    Trajectory t;
    run_ctmc(x0, policy, horizon, uniform, lambda, mu,
             [&](int x, double dt, Event e, bool rejected) {
                 t.records.push_back({x, dt, e, rejected});
                 t.total_time += dt;
             });
    return t;
}

/// [sum c x dt + R 1{rejected}] / total_time.
double trajectory_cost_average(const Trajectory& traj, double c, double R);

/// sum c x (e^{-beta t0} - e^{-beta t1}) / beta + R 1{rejected} e^{-beta t1}.
double trajectory_cost_discounted(const Trajectory& traj, double c, double R, double beta);

struct PerformanceMetric {
    enum class Kind { average, discounted };
    Kind kind = Kind::average;
    double beta = 0.0;

    static PerformanceMetric average() { return {Kind::average, 0.0}; }
    static PerformanceMetric discounted(double beta) { return {Kind::discounted, beta}; }
    /// "average" or "discounted(beta=...)".
    std::string tag() const;
};

enum class InitialDistribution { stationary, uniform };

std::string to_string(InitialDistribution d);

struct SamplingOptions {
    /// Overrides the default horizon when set.
    std::optional<double> horizon;
    /// Discounted runs stop at ln(1/epsilon)/beta by default.
    double truncation_epsilon = 1e-6;
    /// Default horizon for average-cost runs.
    double average_horizon = 5000.0;
    /// Worker threads; 0 means std::thread::hardware_concurrency().
    unsigned threads = 0;
    /// Label stored in the sample metadata.
    std::string policy_tag;
};

double default_horizon(const PerformanceMetric& metric, const SamplingOptions& options = {});

/**
 * M i.i.d. trajectory costs. Trajectory i draws every variate (including its
 * initial state) from substream i of `master_seed`, so the output does not
 * depend on thread count, and two policies sampled with the same seed share
 * random numbers index by index.
 */
SampleSet sample_performance(const QueueParams& params, const Policy& policy,
                             const PerformanceMetric& metric, InitialDistribution initial,
                             std::size_t M, std::uint64_t master_seed,
                             const SamplingOptions& options = {});

}  // namespace sysmdp::queue

#include "sysmdp/simulation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "sysmdp/chain.hpp"
#include "sysmdp/rng.hpp"

namespace sysmdp::queue {

namespace {

// Draws every variate of one trajectory from its own substream.
struct SubstreamUniform {
    Rng rng;
    double operator()() { return rng.uniform_open0(); }
};

class AverageCost {
public:
    AverageCost(double c, double R) : c_(c), R_(R) {}
    void operator()(int x, double dt, Event, bool rejected) {
        sum_ += c_ * x * dt + (rejected ? R_ : 0.0);
        time_ += dt;
    }
    double value() const {
        if (!(time_ > 0.0)) throw std::invalid_argument("average cost of an empty trajectory");
        return sum_ / time_;
    }

private:
    double c_, R_;
    double sum_ = 0.0;
    double time_ = 0.0;
};

class DiscountedCost {
public:
    DiscountedCost(double c, double R, double beta) : c_(c), R_(R), beta_(beta) {}
    void operator()(int x, double dt, Event, bool rejected) {
        // e^{-beta t0} - e^{-beta t1} = e^{-beta t0} (1 - e^{-beta dt}), kept accurate for small dt.
        const double decay = -std::expm1(-beta_ * dt);
        const double end = discount_ * (1.0 - decay);
        sum_ += c_ * x * discount_ * decay / beta_;
        if (rejected) sum_ += R_ * end;
        discount_ = end;
    }
    double value() const { return sum_; }

private:
    double c_, R_, beta_;
    double discount_ = 1.0;
    double sum_ = 0.0;
};

// Shortest form that round-trips.
std::string format_double(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general);
    return std::string(buf, r.ptr);
}

}  // namespace

double trajectory_cost_average(const Trajectory& traj, double c, double R) {
    AverageCost acc(c, R);
    for (const auto& r : traj.records) acc(r.state, r.dt, r.event, r.rejected);
    return acc.value();
}

double trajectory_cost_discounted(const Trajectory& traj, double c, double R, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
    DiscountedCost acc(c, R, beta);
    for (const auto& r : traj.records) acc(r.state, r.dt, r.event, r.rejected);
    return acc.value();
}

std::string PerformanceMetric::tag() const {
    if (kind == Kind::average) return "average";
    return "discounted(beta=" + format_double(beta) + ")";
}

std::string to_string(InitialDistribution d) {
    return d == InitialDistribution::stationary ? "stationary" : "uniform";
}

double default_horizon(const PerformanceMetric& metric, const SamplingOptions& options) {
    if (options.horizon) return *options.horizon;
    if (metric.kind == PerformanceMetric::Kind::average) return options.average_horizon;
    if (!(metric.beta > 0.0)) throw std::invalid_argument("beta must be > 0");
    return std::log(1.0 / options.truncation_epsilon) / metric.beta;
}

SampleSet sample_performance(const QueueParams& params, const Policy& policy,
                             const PerformanceMetric& metric, InitialDistribution initial,
                             std::size_t M, std::uint64_t master_seed,
                             const SamplingOptions& options) {
    params.validate();
    if (M < 1) throw std::invalid_argument("M must be >= 1");
    if (policy.size() != static_cast<std::size_t>(params.N + 1)) {
        throw std::invalid_argument("policy length does not match N + 1");
    }
    const auto qm = build_queue_mdp(params, Criterion::average);
    check_feasible(qm.model, policy);
    const bool discounted = metric.kind == PerformanceMetric::Kind::discounted;
    if (discounted && !(metric.beta > 0.0)) throw std::invalid_argument("beta must be > 0");
    const double horizon = default_horizon(metric, options);
    if (!(horizon >= 0.0)) throw std::invalid_argument("horizon must be >= 0");

    // Inverse-transform table for the initial state.
    std::vector<double> cumulative;
    if (initial == InitialDistribution::stationary) {
        const Vector phi = stationary_distribution(apply_policy(qm.model, policy).transition).phi;
        double acc = 0.0;
        for (Eigen::Index i = 0; i < phi.size(); ++i) cumulative.push_back(acc += phi(i));
    } else {
        for (int x = 1; x <= params.N; ++x) cumulative.push_back(double(x) / params.N);
    }
    cumulative.back() = 1.0;

    std::vector<double> costs(M);
    const auto run_one = [&](std::size_t i) {
        SubstreamUniform u{Rng(substream_seed(master_seed, stream::kTrajectory, i))};
        const double draw = u();
        const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), draw);
        const int x0 = static_cast<int>(std::min<std::ptrdiff_t>(
            it - cumulative.begin(), static_cast<std::ptrdiff_t>(cumulative.size()) - 1));
        if (discounted) {
            DiscountedCost acc(params.c, params.R, metric.beta);
            run_ctmc(x0, policy, horizon, u, params.lambda, params.mu, acc);
            costs[i] = acc.value();
        } else {
            AverageCost acc(params.c, params.R);
            run_ctmc(x0, policy, horizon, u, params.lambda, params.mu, acc);
            costs[i] = acc.value();
        }
    };

    unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(M)));
    if (threads == 1) {
        for (std::size_t i = 0; i < M; ++i) run_one(i);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t i = t; i < M; i += threads) run_one(i);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    SampleSet s;
    s.values = std::move(costs);
    s.meta.seed = master_seed;
    s.meta.M = M;
    s.meta.rng = std::string(kRngAlgorithm);
    s.meta.horizon = horizon;
    s.meta.metric = metric.tag();
    s.meta.initial = to_string(initial);
    s.meta.policy = options.policy_tag.empty() ? to_string(policy) : options.policy_tag;
    s.meta.params = {{"lambda", params.lambda}, {"mu", params.mu}, {"c", params.c},
                     {"R", params.R},           {"N", double(params.N)}};
    if (discounted) s.meta.params.emplace_back("beta", metric.beta);
    return s;
}

}  // namespace sysmdp::queue

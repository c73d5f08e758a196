#include <doctest.h>

#include <cmath>

#include "sysmdp/rng.hpp"
#include "sysmdp/simulation.hpp"
#include "sysmdp/stats.hpp"

using namespace sysmdp;
using namespace sysmdp::queue;

namespace {

// Replays a fixed variate sequence cyclically.
struct Stub {
    std::vector<double> seq;
    std::size_t i = 0;
    double operator()() { return seq[i++ % seq.size()]; }
};

struct Uniform {
    Rng rng;
    double operator()() { return rng.uniform_open0(); }
};

}  // namespace

TEST_CASE("zero horizon gives an empty trajectory") {
    Stub s{{0.5}};
    const auto t = simulate_trajectory(0, threshold_policy(30, 30), 0.0, s, 1.0, 0.95);
    CHECK(t.records.empty());
    CHECK_THROWS_AS(trajectory_cost_average(t, 1, 200), std::invalid_argument);
}

TEST_CASE("forced unit waits and arrivals climb by one") {
    const double gamma = 1.95;
    // -log(u)/gamma = 1 and u > mu/gamma forces an arrival.
    Stub s{{std::exp(-gamma), 0.99}};
    const auto t = simulate_trajectory(0, threshold_policy(30, 30), 5.0, s, 1.0, 0.95);
    REQUIRE(t.records.size() == 5);
    for (std::size_t k = 0; k < 5; ++k) {
        CHECK(t.records[k].state == static_cast<int>(k));
        CHECK(t.records[k].dt == doctest::Approx(1.0));
        CHECK(t.records[k].event == Event::arrival);
        CHECK_FALSE(t.records[k].rejected);
    }
    CHECK(t.total_time == doctest::Approx(5.0));
}

TEST_CASE("rejections happen only on arrivals the policy refuses") {
    const double gamma = 1.95;
    SUBCASE("arrivals at the threshold are rejected") {
        Stub s{{std::exp(-gamma), 0.99}};
        const auto t = simulate_trajectory(2, threshold_policy(2, 30), 3.0, s, 1.0, 0.95);
        for (const auto& r : t.records) {
            CHECK(r.state == 2);
            CHECK(r.rejected);
        }
    }
    SUBCASE("services in a rejecting state are not charged") {
        Stub s{{std::exp(-gamma), 0.01}};
        const auto t = simulate_trajectory(3, threshold_policy(0, 30), 5.0, s, 1.0, 0.95);
        const int expected[] = {3, 2, 1, 0, 0};
        for (std::size_t k = 0; k < 5; ++k) {
            CHECK(t.records[k].state == expected[k]);
            CHECK(t.records[k].event == Event::service);
            CHECK_FALSE(t.records[k].rejected);
        }
    }
    Stub any{{0.5}};
    CHECK_THROWS_AS(simulate_trajectory(31, threshold_policy(2, 30), 1.0, any, 1.0, 0.95),
                    std::invalid_argument);
}

TEST_CASE("trajectory invariants and arrival frequency") {
    Uniform u{Rng(2024)};
    const auto policy = threshold_policy(17, 30);
    const auto t = simulate_trajectory(0, policy, 520000.0, u, 1.0, 0.95);
    REQUIRE(t.records.size() > 1000000);
    std::size_t arrivals = 0;
    for (std::size_t k = 0; k < t.records.size(); ++k) {
        const auto& r = t.records[k];
        CHECK_FALSE((r.state < 0 || r.state > 30));
        CHECK_FALSE(r.dt <= 0.0);
        CHECK_FALSE((r.rejected && r.event != Event::arrival));
        if (r.event == Event::arrival) ++arrivals;
        if (k + 1 < t.records.size()) {
            const int next = t.records[k + 1].state;
            int expected = r.state;
            if (r.event == Event::service) expected = std::max(0, r.state - 1);
            else if (policy[static_cast<std::size_t>(r.state)] == kAccept) expected = std::min(30, r.state + 1);
            CHECK_FALSE(next != expected);
        }
    }
    CHECK(std::abs(double(arrivals) / t.records.size() - 1.0 / 1.95) < 0.002);
}

TEST_CASE("cost functionals on hand-built trajectories") {
    Trajectory one;
    one.records = {{2, 5.0, Event::service, false}};
    one.total_time = 5.0;
    CHECK(trajectory_cost_average(one, 1.0, 200.0) == doctest::Approx(2.0));

    Trajectory rej;
    rej.records = {{0, 4.0, Event::arrival, true}};
    rej.total_time = 4.0;
    CHECK(trajectory_cost_average(rej, 1.0, 200.0) == doctest::Approx(50.0));

    Trajectory hold;
    hold.records = {{1, 3.0, Event::service, false}};
    hold.total_time = 3.0;
    const double beta = 0.1;
    CHECK(trajectory_cost_discounted(hold, 1.0, 200.0, beta) == doctest::Approx((1 - std::exp(-0.3)) / beta));
    // The penalty is discounted at the end of its sojourn.
    CHECK(trajectory_cost_discounted(rej, 1.0, 200.0, beta) == doctest::Approx(200 * std::exp(-0.4)));

    Trajectory late;
    late.records = {{0, 1000.0, Event::service, false}, {5, 1.0, Event::arrival, true}};
    CHECK(trajectory_cost_discounted(late, 1.0, 200.0, 1.0) < 1e-300);
    CHECK_THROWS_AS(trajectory_cost_discounted(hold, 1, 1, 0.0), std::invalid_argument);
}

TEST_CASE("default horizons") {
    CHECK(default_horizon(PerformanceMetric::average()) == 5000.0);
    CHECK(default_horizon(PerformanceMetric::discounted(2e-3)) == doctest::Approx(std::log(1e6) / 2e-3));
    SamplingOptions o;
    o.horizon = 12.0;
    CHECK(default_horizon(PerformanceMetric::discounted(2e-3), o) == 12.0);
}

TEST_CASE("sampling is reproducible and thread-count independent") {
    const QueueParams p;
    const auto pol = threshold_policy(17, 30);
    SamplingOptions o;
    o.horizon = 200.0;
    o.threads = 1;
    const auto a = sample_performance(p, pol, PerformanceMetric::average(), InitialDistribution::uniform, 64, 5, o);
    o.threads = 4;
    const auto b = sample_performance(p, pol, PerformanceMetric::average(), InitialDistribution::uniform, 64, 5, o);
    CHECK(a.values == b.values);
    const auto single = sample_performance(p, pol, PerformanceMetric::average(), InitialDistribution::uniform, 1, 5, o);
    CHECK(single.values[0] == a.values[0]);
    CHECK(a.meta.seed == 5);
    CHECK(a.meta.M == 64);
    CHECK(a.meta.horizon == std::optional<double>(200.0));
    CHECK(a.meta.metric == "average");
    CHECK(a.meta.initial == "uniform");
    const auto c = sample_performance(p, pol, PerformanceMetric::average(), InitialDistribution::uniform, 64, 6, o);
    CHECK(c.values != a.values);
}

TEST_CASE("common random numbers couple policies index by index") {
    const QueueParams p;
    SamplingOptions o;
    o.horizon = 500.0;
    const auto a = sample_performance(p, threshold_policy(17, 30), PerformanceMetric::average(),
                                      InitialDistribution::uniform, 400, 11, o);
    const auto b = sample_performance(p, threshold_policy(16, 30), PerformanceMetric::average(),
                                      InitialDistribution::uniform, 400, 11, o);
    CHECK(pearson_correlation(a.values, b.values) > 0.5);
}

TEST_CASE("stationary average-cost samples agree with theory") {
    const QueueParams p;
    const double betas[] = {2e-3};
    const auto theory = queue_metric_report(p, threshold_policy(17, 30), betas);
    SamplingOptions o;
    o.horizon = 2000.0;
    const auto s = sample_performance(p, threshold_policy(17, 30), PerformanceMetric::average(),
                                      InitialDistribution::stationary, 2000, 3, o);
    const auto sm = summarize(s.values);
    CHECK(std::abs(sm.mean - theory.eta_avg) < 3 * sm.std / std::sqrt(2000.0));
}

TEST_CASE("discounted samples agree with the discounted values") {
    QueueParams p;
    p.N = 8;
    const double beta = 0.05;
    const double betas[] = {beta};
    const auto theory = queue_metric_report(p, threshold_policy(5, 8), betas);
    const auto s = sample_performance(p, threshold_policy(5, 8), PerformanceMetric::discounted(beta),
                                      InitialDistribution::uniform, 4000, 8, {});
    const auto sm = summarize(s.values);
    CHECK(std::abs(sm.mean - theory.discounted[0].nu_disc) < 3 * sm.std / std::sqrt(4000.0));
}

TEST_CASE("sampling preconditions") {
    const QueueParams p;
    CHECK_THROWS_AS(sample_performance(p, threshold_policy(17, 30), PerformanceMetric::average(),
                                       InitialDistribution::uniform, 0, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(sample_performance(p, threshold_policy(17, 20), PerformanceMetric::average(),
                                       InitialDistribution::uniform, 1, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(sample_performance(p, threshold_policy(17, 30), PerformanceMetric::discounted(0.0),
                                       InitialDistribution::uniform, 1, 1),
                    std::invalid_argument);
}

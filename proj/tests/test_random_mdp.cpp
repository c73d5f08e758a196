#include <doctest.h>

#include "sysmdp/chain.hpp"
#include "sysmdp/metrics.hpp"
#include "sysmdp/random_mdp.hpp"
#include "sysmdp/solvers.hpp"
#include "support.hpp"

using namespace sysmdp;
using namespace testing;

TEST_CASE("Dirichlet on one point") {
    Rng rng(1);
    const double theta[] = {1.0};
    CHECK(sample_dirichlet(theta, rng)(0) == 1.0);
}

TEST_CASE("Dirichlet means") {
    Rng rng(42);
    const double flat[] = {1, 1, 1};
    Vector sum = Vector::Zero(3);
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const Vector d = sample_dirichlet(flat, rng);
        CHECK(std::abs(d.sum() - 1.0) < 1e-12);
        sum += d;
    }
    CHECK(max_abs_diff(Vector(sum / n), Vector::Constant(3, 1.0 / 3)) < 0.01);

    const double skew[] = {2, 1};
    double first = 0.0;
    for (int i = 0; i < n; ++i) first += sample_dirichlet(skew, rng)(0);
    CHECK(std::abs(first / n - 2.0 / 3) < 0.01);
}

TEST_CASE("Dirichlet rejects non-positive concentration") {
    Rng rng(1);
    const double bad[] = {1.0, 0.0};
    CHECK_THROWS_AS(sample_dirichlet(bad, rng), std::invalid_argument);
}

TEST_CASE("spec validation") {
    RandomMdpSpec s;
    s.n_transient = 5;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = {};
    s.cost_low = 3;
    s.cost_high = 1;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = {};
    s.dirichlet_theta = {1, 2};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);  // length neither 1 nor n_states
}

TEST_CASE("no transients means strictly positive rows") {
    RandomMdpSpec s;
    s.seed = 9;
    const auto m = sample_random_mdp(s);
    CHECK(validate_model(m).empty());
    for (const auto& p : m.transitions) CHECK(p.minCoeff() > 0.0);
    for (const auto& pol : PolicySpace(m)) CHECK(classify_chain(apply_policy(m, pol).transition).is_recurrent);
    for (const auto& c : m.costs) {
        CHECK(c.minCoeff() >= 0.0);
        CHECK(c.maxCoeff() <= 10.0);
    }
}

TEST_CASE("transient block matches the fixture's zero pattern") {
    RandomMdpSpec s;
    s.n_transient = 3;
    s.seed = 7;
    const auto m = sample_random_mdp(s);
    CHECK(validate_model(m).empty());
    for (const auto& p : m.transitions) {
        CHECK(p.block(0, 2, 2, 3).cwiseAbs().maxCoeff() == 0.0);
        CHECK(p.block(2, 0, 3, 5).minCoeff() > 0.0);
        const auto c = classify_chain(p);
        REQUIRE(c.recurrent_classes.size() == 1);
        CHECK(c.transient_states == StateSet{2, 3, 4});
    }
    for (const auto& pol : PolicySpace(m)) {
        const Vector phi = stationary_distribution(apply_policy(m, pol).transition).phi;
        CHECK(phi.tail(3).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("same seed gives the same model bit for bit") {
    RandomMdpSpec s;
    s.n_transient = 2;
    s.seed = 1234;
    const auto a = sample_random_mdp(s);
    const auto b = sample_random_mdp(s);
    for (std::size_t i = 0; i < a.n_actions(); ++i) {
        CHECK(a.transitions[i] == b.transitions[i]);
        CHECK(a.costs[i] == b.costs[i]);
    }
    s.seed = 1235;
    CHECK(sample_random_mdp(s).transitions[0] != a.transitions[0]);
}

TEST_CASE("fixture values as given") {
    const auto m = load_reference_fixture();
    CHECK(m.transitions[0](0, 1) == 0.9241);
    CHECK(m.costs[1](1) == 1.6244);
    CHECK(validate_model(m, kFixtureRowTolerance).empty());
    CHECK_THROWS_AS(load_reference_fixture("/nonexistent/random5.json"), Error);
}

TEST_CASE("generated pipeline satisfies the Laurent identity") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        RandomMdpSpec s;
        s.seed = seed;
        const auto m = sample_random_mdp(s);
        const auto avg = policy_iteration_average(m);
        const auto disc = policy_iteration_discounted(m, 0.99);
        const double alphas[] = {0.99};
        for (const auto& p : {avg.policy, disc.policy}) {
            const auto r = metric_report(m, p, alphas);
            CHECK(r.discounted[0].eta_disc ==
                  doctest::Approx(eta_discounted_from_average(r.eta_avg, 0.99)).epsilon(1e-8));
        }
        const auto ra = metric_report(m, avg.policy, alphas);
        const auto rd = metric_report(m, disc.policy, alphas);
        CHECK(ra.eta_avg <= rd.eta_avg + 1e-12);
        CHECK(ra.discounted[0].eta_disc <= rd.discounted[0].eta_disc + 1e-9);
    }
}

#include <doctest.h>

#include <set>

#include "sysmdp/model.hpp"
#include "sysmdp/queue.hpp"
#include "sysmdp/random_mdp.hpp"
#include "support.hpp"

using namespace sysmdp;
using namespace testing;

TEST_CASE("identity chain validates") {
    const auto m = single_action(mat({{1.0}}), vec({0.0}));
    CHECK(validate_model(m).empty());
}

TEST_CASE("short row is reported with its sum and coordinates") {
    auto m = single_action(mat({{0.5, 0.4}, {0.0, 1.0}}), vec({0.0, 0.0}));
    const auto v = validate_model(m);
    REQUIRE(v.size() == 1);
    CHECK(v[0].message.find("row sum 0.9") != std::string::npos);
    CHECK(v[0].state == std::optional<std::size_t>(0));
    CHECK(v[0].action == std::optional<int>(0));
}

TEST_CASE("every invariant violation is collected") {
    MdpModel m;
    m.n_states = 2;
    m.actions = {{}, {0, 3}};
    m.transitions = {mat({{-0.1, 1.1}, {0.5, 0.5}})};
    m.costs = {vec({NAN, 1.0})};
    const auto v = validate_model(m);
    // empty action set, unknown action, negative entry, non-finite cost
    CHECK(v.size() >= 4);
}

TEST_CASE("fixture validates at four-decimal precision") {
    const auto m = load_reference_fixture();
    CHECK(m.n_states == 5);
    CHECK(validate_model(m, kFixtureRowTolerance).empty());
    CHECK_FALSE(validate_model(m).empty());  // four-decimal rows do not sum to 1 to 1e-12
}

TEST_CASE("apply_policy selects rows and costs") {
    MdpModel m;
    m.n_states = 2;
    m.actions = {{0, 1}, {0, 1}};
    m.transitions = {mat({{1, 0}, {0, 1}}), mat({{0, 1}, {1, 0}})};
    m.costs = {vec({1, 2}), vec({3, 4})};
    const auto pm = apply_policy(m, Policy({1, 0}));
    CHECK(pm.transition(0, 1) == 1.0);
    CHECK(pm.transition(1, 1) == 1.0);
    CHECK(pm.cost(0) == 3.0);
    CHECK(pm.cost(1) == 2.0);

    const auto zero = apply_policy(m, Policy({0, 0}));
    CHECK(zero.transition == m.transitions[0]);
    CHECK(zero.cost == m.costs[0]);
}

TEST_CASE("fixture e4 takes the fourth row from P1 and the rest from P0") {
    const auto m = load_reference_fixture();
    const auto pm = apply_policy(m, fixture_policy({3}));
    for (Eigen::Index i : {0, 1, 2, 4}) CHECK(pm.transition.row(i) == m.transitions[0].row(i));
    CHECK(pm.transition.row(3) == m.transitions[1].row(3));
    CHECK(pm.cost(3) == m.costs[1](3));
}

TEST_CASE("infeasible action names the state") {
    const auto qm = queue::build_queue_mdp({.N = 3}, queue::Criterion::average);
    Policy bad({1, 1, 1, 1});
    try {
        apply_policy(qm.model, bad);
        FAIL("expected InfeasiblePolicy");
    } catch (const InfeasiblePolicy& e) {
        CHECK(e.state() == 3);
        CHECK(e.action() == 1);
    }
}

TEST_CASE("policy enumeration counts and uniqueness") {
    SUBCASE("2 states x 2 actions") {
        MdpModel m;
        m.n_states = 2;
        m.actions = {{0, 1}, {0, 1}};
        m.transitions = {Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
        m.costs = {Vector::Zero(2), Vector::Zero(2)};
        CHECK(PolicySpace(m).size() == 4);
    }
    SUBCASE("queue N=3 has A(3)={0}") {
        const auto qm = queue::build_queue_mdp({.N = 3}, queue::Criterion::average);
        PolicySpace space(qm.model);
        CHECK(space.size() == 8);
        std::set<std::vector<int>> seen;
        for (const auto& p : space) {
            CHECK(p[3] == 0);
            seen.insert(p.actions);
            const auto pm = apply_policy(qm.model, p);
            CHECK((pm.transition.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
        }
        CHECK(seen.size() == 8);
    }
    SUBCASE("fixture has 32 policies") {
        const auto m = load_reference_fixture();
        std::uint64_t n = 0;
        for (const auto& p : PolicySpace(m)) {
            (void)p;
            ++n;
        }
        CHECK(n == 32);
        CHECK(enumerate_policies(m).size() == 32);
    }
}

TEST_CASE("enumeration cap reports the product") {
    MdpModel m;
    m.n_states = 30;
    m.actions.assign(30, {0, 1});
    m.transitions = {Matrix::Identity(30, 30), Matrix::Identity(30, 30)};
    m.costs = {Vector::Zero(30), Vector::Zero(30)};
    CHECK_THROWS_WITH_AS(PolicySpace{m}, doctest::Contains("1073741824"), Error);
}

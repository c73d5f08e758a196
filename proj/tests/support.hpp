#pragma once

#include <cmath>
#include <vector>

#include "sysmdp/model.hpp"
#include "sysmdp/random_mdp.hpp"
#include "sysmdp/solvers.hpp"

namespace testing {

using sysmdp::Matrix;
using sysmdp::MdpModel;
using sysmdp::Policy;
using sysmdp::Vector;

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index r = 0;
    for (const auto& row : rows) {
        Eigen::Index c = 0;
        for (double v : row) m(r, c++) = v;
        ++r;
    }
    return m;
}

inline Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

inline MdpModel single_action(const Matrix& p, const Vector& c) {
    MdpModel m;
    m.n_states = static_cast<std::size_t>(p.rows());
    m.actions.assign(m.n_states, {0});
    m.transitions = {p};
    m.costs = {c};
    return m;
}

/// Fixture policy picking action 1 exactly at the listed (0-based) states.
inline Policy fixture_policy(std::initializer_list<int> ones) {
    Policy p(std::vector<int>(5, 0));
    for (int s : ones) p[static_cast<std::size_t>(s)] = 1;
    return p;
}

inline double max_abs_diff(const Vector& a, const Vector& b) { return (a - b).cwiseAbs().maxCoeff(); }
inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

/// Copy with every row rescaled to sum to 1, for identities that need exact stochasticity.
inline MdpModel normalized(MdpModel m) {
    for (auto& p : m.transitions) {
        for (Eigen::Index r = 0; r < p.rows(); ++r) p.row(r) /= p.row(r).sum();
    }
    return m;
}

/// The twenty small seeded specs shared by the oracle tests.
inline std::vector<sysmdp::RandomMdpSpec> small_specs() {
    std::vector<sysmdp::RandomMdpSpec> specs;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        sysmdp::RandomMdpSpec s;
        s.n_states = 3 + seed % 3;  // 3..5 states, at most 32 policies
        s.n_actions = 2;
        s.n_transient = seed % 2 ? 0 : 1;
        s.seed = seed;
        specs.push_back(s);
    }
    return specs;
}

}  // namespace testing

#pragma once

#include <cstddef>
#include <cstdint>
#include <iterator>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sysmdp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A linear system could not be solved to the required residual.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A policy selects an action that is not feasible in some state.
class InfeasiblePolicy : public Error {
public:
    InfeasiblePolicy(std::size_t state, int action);
    std::size_t state() const noexcept { return state_; }
    int action() const noexcept { return action_; }

private:
    std::size_t state_;
    int action_;
};

/**
 * Finite MDP (X, A, P, C) with dense per-action matrices.
 *
 * Action indices are dense integers 0..n_actions()-1 shared by all states;
 * `actions[x]` lists the subset that is feasible in state x. Every action
 * owns a full |X|x|X| transition matrix and a length-|X| cost vector, even
 * if some rows are never consulted.
 */
struct MdpModel {
    std::size_t n_states = 0;
    std::vector<std::vector<int>> actions;
    std::vector<Matrix> transitions;
    std::vector<Vector> costs;

    std::size_t n_actions() const noexcept { return transitions.size(); }
    bool feasible(std::size_t state, int action) const;
};

struct Violation {
    std::string message;
    std::optional<std::size_t> state;
    std::optional<int> action;
};

/// Default tolerance on |row sum - 1| for stochastic rows.
inline constexpr double kRowSumTolerance = 1e-12;

/// Returns every invariant violation of `model`; empty means valid.
std::vector<Violation> validate_model(const MdpModel& model,
                                      double row_tolerance = kRowSumTolerance);

/// Stationary deterministic Markov policy: state index -> action index.
struct Policy {
    std::vector<int> actions;

    Policy() = default;
    explicit Policy(std::vector<int> a) : actions(std::move(a)) {}

    std::size_t size() const noexcept { return actions.size(); }
    int operator[](std::size_t x) const { return actions[x]; }
    int& operator[](std::size_t x) { return actions[x]; }

    bool operator==(const Policy&) const = default;
};

std::string to_string(const Policy& policy);

/// The Markov chain (P_pi, C_pi) induced by a policy.
struct PolicyModel {
    Matrix transition;
    Vector cost;

    std::size_t n_states() const noexcept { return static_cast<std::size_t>(cost.size()); }
};

/// Throws InfeasiblePolicy naming the first state whose action is not in A(x).
void check_feasible(const MdpModel& model, const Policy& policy);

PolicyModel apply_policy(const MdpModel& model, const Policy& policy);

/// Policy that picks the first listed feasible action in every state.
Policy first_feasible_policy(const MdpModel& model);

/**
 * The finite set of stationary deterministic policies of a model, iterated
 * in odometer order (state 0 varies fastest).
 */
class PolicySpace {
public:
    static constexpr std::uint64_t kDefaultCap = 1'000'000;

    /// Throws Error if the number of policies exceeds `cap`.
    explicit PolicySpace(const MdpModel& model, std::uint64_t cap = kDefaultCap);

    std::uint64_t size() const noexcept { return count_; }

    class iterator {
    public:
        using iterator_category = std::input_iterator_tag;
        using value_type = Policy;
        using difference_type = std::ptrdiff_t;
        using pointer = const Policy*;
        using reference = const Policy&;

        iterator() = default;
        reference operator*() const { return current_; }
        pointer operator->() const { return &current_; }
        iterator& operator++();
        iterator operator++(int) {
            auto tmp = *this;
            ++*this;
            return tmp;
        }
        bool operator==(const iterator& other) const { return ordinal_ == other.ordinal_; }

    private:
        friend class PolicySpace;
        iterator(const std::vector<std::vector<int>>* actions, std::uint64_t ordinal);

        const std::vector<std::vector<int>>* actions_ = nullptr;
        std::vector<std::size_t> digits_;
        Policy current_;
        std::uint64_t ordinal_ = 0;
    };

    iterator begin() const;
    iterator end() const;

private:
    std::vector<std::vector<int>> actions_;
    std::uint64_t count_ = 0;
};

/// Convenience wrapper: PolicySpace(model, cap).
PolicySpace enumerate_policies(const MdpModel& model,
                               std::uint64_t cap = PolicySpace::kDefaultCap);

}  // namespace sysmdp

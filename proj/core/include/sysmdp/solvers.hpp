#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sysmdp/model.hpp"

namespace sysmdp {

/// Solution of J = C_pi + alpha P_pi J.
struct DiscountedSolution {
    Vector values;
    double alpha = 0.0;
    double residual = 0.0;
};

/// Solution of h + J 1 = C_pi + P_pi h with h(distinguished_state) = 0.
struct AverageSolution {
    double gain = 0.0;
    Vector bias;
    std::size_t distinguished_state = 0;
    double residual = 0.0;
};

template <class Solution>
struct PolicyIterationResult {
    Policy policy;
    Solution solution;
    int iterations = 0;
};

struct SolverOptions {
    /// Incumbent kept when its Q-value is within this of the minimum.
    double tie_tolerance = 1e-10;
    int max_iterations = 10'000;
    /// Starting policy; defaults to the first feasible action everywhere.
    std::optional<Policy> initial_policy;
};

/// Absolute Bellman residual accepted by the evaluators (scaled by max(1, |values|)).
inline constexpr double kBellmanTolerance = 1e-9;

/// Throws std::domain_error unless 0 < alpha < 1.
DiscountedSolution evaluate_discounted(const PolicyModel& pm, double alpha);

/**
 * Average-cost evaluation through the augmented (|X|+1) system
 * [[I - P, 1], [e_#^T, 0]] [h; J] = [C; 0].
 *
 * Throws NumericalError("gain not state-independent; chain is not unichain")
 * if the augmented matrix is singular.
 */
AverageSolution evaluate_average(const PolicyModel& pm, std::size_t distinguished_state = 0);

/// Q-values C^a(x) + alpha sum_x' P^a(x'|x) V(x'); infeasible entries are +inf.
Matrix q_values(const MdpModel& model, const Vector& values, double alpha);

/// Greedy step with incumbent-first tie-breaking, then lowest action index.
Policy improve_policy(const MdpModel& model, const Vector& values, double alpha,
                      const Policy& incumbent, double tie_tolerance = 1e-10);

PolicyIterationResult<DiscountedSolution> policy_iteration_discounted(
    const MdpModel& model, double alpha, const SolverOptions& options = {});

PolicyIterationResult<AverageSolution> policy_iteration_average(
    const MdpModel& model, std::size_t distinguished_state = 0,
    const SolverOptions& options = {});

struct GainMembership {
    bool is_member = false;
    Policy improved;
    double gain_candidate = 0.0;
    double gain_improved = 0.0;
};

/**
 * One average-cost improvement step from `candidate`. The candidate is
 * reported gain-optimal iff the step leaves it unchanged; otherwise the
 * improved policy is evaluated as well.
 */
GainMembership gain_optimal_membership(const MdpModel& model, const Policy& candidate,
                                       std::size_t distinguished_state = 0);

/**
 * Finite-grid evidence for Blackwell optimality. A finite grid can only
 * support, never prove, optimality on a whole interval (alpha_bar, 1).
 */
struct BlackwellVerdict {
    bool is_gain_optimal = false;
    /// Grid points at which the candidate's discounted values match the optimum.
    std::vector<double> discounted_optimal_at;
    /// Smallest grid index i such that the candidate is optimal at every grid
    /// point from i on (grid sorted ascending); empty if none.
    std::optional<std::size_t> consistent_from;
    /// is_gain_optimal and consistent_from is set.
    bool consistent = false;
};

BlackwellVerdict blackwell_check(const MdpModel& model, const Policy& candidate,
                                 std::span<const double> alpha_grid,
                                 double value_tolerance = 1e-8);

}  // namespace sysmdp

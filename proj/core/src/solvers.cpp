#include "sysmdp/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sysmdp/linalg.hpp"

namespace sysmdp {

namespace {

void require_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::domain_error("discount factor must lie in (0, 1), got " +
                                std::to_string(alpha));
    }
}

void require_residual(double residual, double scale, const char* what) {
    if (!(residual <= kBellmanTolerance * std::max(1.0, scale))) {
        throw NumericalError(std::string(what) + " Bellman residual " +
                             std::to_string(residual) + " exceeds tolerance");
    }
}

}  // namespace

DiscountedSolution evaluate_discounted(const PolicyModel& pm, double alpha) {
    require_alpha(alpha);
    const auto n = pm.transition.rows();
    const Matrix a = Matrix::Identity(n, n) - alpha * pm.transition;
    DiscountedSolution s;
    s.alpha = alpha;
    s.values = linalg::solve(a, pm.cost);
    s.residual = linalg::inf_norm(Vector(s.values - pm.cost - alpha * pm.transition * s.values));
    require_residual(s.residual, linalg::inf_norm(s.values), "discounted");
    return s;
}

AverageSolution evaluate_average(const PolicyModel& pm, std::size_t distinguished_state) {
    const auto n = pm.transition.rows();
    if (distinguished_state >= static_cast<std::size_t>(n)) {
        throw Error("distinguished state out of range");
    }
    Matrix a = Matrix::Zero(n + 1, n + 1);
    a.topLeftCorner(n, n) = Matrix::Identity(n, n) - pm.transition;
    a.topRightCorner(n, 1).setOnes();
    a(n, static_cast<Eigen::Index>(distinguished_state)) = 1.0;
    Vector b = Vector::Zero(n + 1);
    b.head(n) = pm.cost;

    Vector x;
    try {
        x = linalg::solve(a, b);
    } catch (const NumericalError&) {
        throw NumericalError("gain not state-independent; chain is not unichain");
    }

    AverageSolution s;
    s.distinguished_state = distinguished_state;
    s.bias = x.head(n);
    s.bias(static_cast<Eigen::Index>(distinguished_state)) = 0.0;
    s.gain = x(n);
    s.residual = linalg::inf_norm(
        Vector(s.bias + s.gain * Vector::Ones(n) - pm.cost - pm.transition * s.bias));
    require_residual(s.residual, std::max(linalg::inf_norm(s.bias), std::abs(s.gain)),
                     "average-cost");
    return s;
}

Matrix q_values(const MdpModel& model, const Vector& values, double alpha) {
    const auto n = static_cast<Eigen::Index>(model.n_states);
    const auto m = static_cast<Eigen::Index>(model.n_actions());
    Matrix q = Matrix::Constant(n, m, std::numeric_limits<double>::infinity());
    for (Eigen::Index x = 0; x < n; ++x) {
        for (int a : model.actions[static_cast<std::size_t>(x)]) {
            const auto ai = static_cast<std::size_t>(a);
            q(x, a) = model.costs[ai](x) + alpha * model.transitions[ai].row(x).dot(values);
        }
    }
    return q;
}

Policy improve_policy(const MdpModel& model, const Vector& values, double alpha,
                      const Policy& incumbent, double tie_tolerance) {
    const Matrix q = q_values(model, values, alpha);
    Policy next = incumbent;
    for (std::size_t x = 0; x < model.n_states; ++x) {
        const auto row = static_cast<Eigen::Index>(x);
        int best = -1;
        double best_q = std::numeric_limits<double>::infinity();
        for (int a : model.actions[x]) {
            if (q(row, a) < best_q || (q(row, a) == best_q && a < best)) {
                best = a;
                best_q = q(row, a);
            }
        }
        const int keep = incumbent[x];
        if (model.feasible(x, keep) && q(row, keep) <= best_q + tie_tolerance) {
            next[x] = keep;
        } else {
            next[x] = best;
        }
    }
    return next;
}

PolicyIterationResult<DiscountedSolution> policy_iteration_discounted(
    const MdpModel& model, double alpha, const SolverOptions& options) {
    require_alpha(alpha);
    Policy policy = options.initial_policy.value_or(first_feasible_policy(model));
    check_feasible(model, policy);
    for (int it = 1; it <= options.max_iterations; ++it) {
        auto solution = evaluate_discounted(apply_policy(model, policy), alpha);
        Policy next = improve_policy(model, solution.values, alpha, policy, options.tie_tolerance);
        if (next == policy) return {std::move(policy), std::move(solution), it};
        policy = std::move(next);
    }
    throw Error("discounted policy iteration did not converge in " +
                std::to_string(options.max_iterations) + " iterations");
}

PolicyIterationResult<AverageSolution> policy_iteration_average(
    const MdpModel& model, std::size_t distinguished_state, const SolverOptions& options) {
    Policy policy = options.initial_policy.value_or(first_feasible_policy(model));
    check_feasible(model, policy);
    for (int it = 1; it <= options.max_iterations; ++it) {
        auto solution = evaluate_average(apply_policy(model, policy), distinguished_state);
        Policy next = improve_policy(model, solution.bias, 1.0, policy, options.tie_tolerance);
        if (next == policy) return {std::move(policy), std::move(solution), it};
        policy = std::move(next);
    }
    throw Error("average-cost policy iteration did not converge in " +
                std::to_string(options.max_iterations) + " iterations");
}

GainMembership gain_optimal_membership(const MdpModel& model, const Policy& candidate,
                                       std::size_t distinguished_state) {
    const auto current = evaluate_average(apply_policy(model, candidate), distinguished_state);
    GainMembership out;
    out.gain_candidate = current.gain;
    out.improved = improve_policy(model, current.bias, 1.0, candidate);
    out.is_member = out.improved == candidate;
    out.gain_improved =
        out.is_member
            ? current.gain
            : evaluate_average(apply_policy(model, out.improved), distinguished_state).gain;
    return out;
}

BlackwellVerdict blackwell_check(const MdpModel& model, const Policy& candidate,
                                 std::span<const double> alpha_grid, double value_tolerance) {
    BlackwellVerdict verdict;
    verdict.is_gain_optimal = gain_optimal_membership(model, candidate).is_member;

    std::vector<double> grid(alpha_grid.begin(), alpha_grid.end());
    std::sort(grid.begin(), grid.end());
    const auto pm = apply_policy(model, candidate);

    std::vector<char> optimal(grid.size(), 0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double alpha = grid[i];
        const auto best = policy_iteration_discounted(model, alpha);
        const auto mine = evaluate_discounted(pm, alpha);
        const double scale = std::max(1.0, linalg::inf_norm(best.solution.values));
        const double gap = (mine.values - best.solution.values).maxCoeff();
        optimal[i] = gap <= value_tolerance * scale;
        if (optimal[i]) verdict.discounted_optimal_at.push_back(alpha);
    }

    for (std::size_t i = grid.size(); i-- > 0;) {
        if (!optimal[i]) break;
        verdict.consistent_from = i;
    }
    verdict.consistent = verdict.is_gain_optimal && verdict.consistent_from.has_value();
    return verdict;
}

}  // namespace sysmdp

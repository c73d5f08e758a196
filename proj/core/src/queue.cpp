#include "sysmdp/queue.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sysmdp/chain.hpp"
#include "sysmdp/solvers.hpp"

namespace sysmdp::queue {

double QueueParams::alpha() const {
    if (!beta) throw std::invalid_argument("discounted queue model requires beta");
    return gamma() / (gamma() + *beta);
}

void QueueParams::validate() const {
    const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(lambda)) throw std::invalid_argument("lambda must be > 0");
    if (!positive(mu)) throw std::invalid_argument("mu must be > 0");
    if (!positive(c)) throw std::invalid_argument("c must be > 0");
    if (!positive(R)) throw std::invalid_argument("R must be > 0");
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    if (beta && !positive(*beta)) throw std::invalid_argument("beta must be > 0");
}

QueueModel build_queue_mdp(const QueueParams& params, Criterion criterion) {
    params.validate();
    if (criterion == Criterion::discounted && !params.beta) {
        throw std::invalid_argument("discounted queue model requires beta");
    }
    const int N = params.N;
    const auto n = static_cast<Eigen::Index>(N + 1);
    const double gamma = params.gamma();
    const double p_arrival = params.lambda / gamma;
    const double p_service = params.mu / gamma;

    QueueModel qm;
    qm.gamma = gamma;
    qm.model.n_states = static_cast<std::size_t>(N + 1);
    for (int x = 0; x < N; ++x) qm.model.actions.push_back({kReject, kAccept});
    qm.model.actions.push_back({kReject});

    Matrix p0 = Matrix::Zero(n, n);
    Matrix p1 = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        // Service (or the fictitious self-transition at 0) and arrival events.
        const Eigen::Index down = std::max<Eigen::Index>(i - 1, 0);
        const Eigen::Index up = std::min<Eigen::Index>(i + 1, N);
        p0(i, i) += p_arrival;
        p0(i, down) += p_service;
        p1(i, up) += p_arrival;
        p1(i, down) += p_service;
    }
    qm.model.transitions = {std::move(p0), std::move(p1)};

    Vector holding(n);
    Vector penalty(n);
    if (criterion == Criterion::average) {
        for (Eigen::Index x = 0; x < n; ++x) holding(x) = params.c * static_cast<double>(x) / gamma;
        penalty.setConstant(p_arrival * params.R);
    } else {
        const double beta = *params.beta;
        const double alpha = params.alpha();
        qm.alpha = alpha;
        for (Eigen::Index x = 0; x < n; ++x) {
            holding(x) = params.c * static_cast<double>(x) / (beta + gamma);
        }
        penalty.setConstant(alpha * p_arrival * params.R);
    }
    qm.model.costs = {holding + penalty, holding};
    return qm;
}

Policy threshold_policy(int x_star, int N) {
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    if (x_star < 0 || x_star > N) {
        throw std::invalid_argument("threshold " + std::to_string(x_star) + " outside [0, " +
                                    std::to_string(N) + "]");
    }
    Policy p(std::vector<int>(static_cast<std::size_t>(N + 1), kReject));
    for (int x = 0; x < x_star; ++x) p[static_cast<std::size_t>(x)] = kAccept;
    return p;
}

std::optional<int> extract_threshold(const Policy& policy) {
    std::size_t x = 0;
    while (x < policy.size() && policy[x] == kAccept) ++x;
    const auto threshold = x;
    for (; x < policy.size(); ++x) {
        if (policy[x] != kReject) return std::nullopt;
    }
    return static_cast<int>(threshold);
}

std::vector<std::size_t> uniform_states(int N) {
    std::vector<std::size_t> s(static_cast<std::size_t>(N));
    for (int x = 0; x < N; ++x) s[static_cast<std::size_t>(x)] = static_cast<std::size_t>(x);
    return s;
}

std::vector<double> q_difference(const QueueModel& qm, const Vector& values) {
    const Matrix q = q_values(qm.model, values, qm.alpha.value_or(1.0));
    std::vector<double> delta;
    for (Eigen::Index x = 0; x + 1 < q.rows(); ++x) delta.push_back(q(x, kAccept) - q(x, kReject));
    return delta;
}

MetricReport queue_metric_report(const QueueParams& params, const Policy& policy,
                                 std::span<const double> betas) {
    const auto avg = build_queue_mdp(params, Criterion::average);
    const PolicyModel pm = apply_policy(avg.model, policy);
    const Vector phi = stationary_distribution(pm.transition).phi;
    const double gain_per_period = evaluate_average(pm).gain;

    MetricReport report;
    report.policy = policy;
    report.eta_avg = gain_per_period * avg.gamma;
    report.nu_avg = report.eta_avg;

    const auto support = uniform_states(params.N);
    for (double beta : betas) {
        QueueParams p = params;
        p.beta = beta;
        const auto disc = build_queue_mdp(p, Criterion::discounted);
        const PolicyModel dpm = apply_policy(disc.model, policy);
        const double alpha = *disc.alpha;
        const auto values = evaluate_discounted(dpm, alpha).values;

        DiscountedMetrics m;
        m.alpha = alpha;
        m.beta = beta;
        m.nu_disc = nu(values, support);
        m.eta_disc = eta_discounted_from_average(gain_per_period, alpha);

        const double direct = eta(phi, values);
        const double via_gain = eta_discounted_from_average(phi.dot(dpm.cost), alpha);
        if (std::abs(direct - via_gain) > 1e-8 * std::max(1.0, std::abs(direct))) {
            throw NumericalError("queue eta^alpha invariant violated at beta " +
                                 std::to_string(beta));
        }
        report.discounted.push_back(m);
    }
    return report;
}

}  // namespace sysmdp::queue

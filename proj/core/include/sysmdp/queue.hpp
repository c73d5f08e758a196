#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sysmdp/metrics.hpp"
#include "sysmdp/model.hpp"

namespace sysmdp::queue {

/// Admission actions of the controlled M/M/1 queue.
inline constexpr int kReject = 0;
inline constexpr int kAccept = 1;

/**
 * Controlled M/M/1/N queue. Defaults are the study parameters
 * (N = 30, lambda = 1, mu = 0.95, c = 1, R = 200).
 */
struct QueueParams {
    double lambda = 1.0;  ///< arrival rate
    double mu = 0.95;     ///< service rate
    double c = 1.0;       ///< holding cost per customer per unit time
    double R = 200.0;     ///< lump-sum rejection penalty
    int N = 30;           ///< maximum queue length
    std::optional<double> beta;  ///< interest rate for the discounted model

    double gamma() const noexcept { return lambda + mu; }
    double rho() const noexcept { return mu / lambda; }
    /// alpha = gamma / (gamma + beta); throws if beta is absent.
    double alpha() const;

    /// Throws std::invalid_argument when an invariant fails.
    void validate() const;
};

enum class Criterion { average, discounted };

struct QueueModel {
    MdpModel model;
    double gamma = 0.0;
    std::optional<double> alpha;
};

/**
 * Uniformised admission-control MDP on states 0..N with A(N) = {reject}.
 *
 * Average costs: C0(x) = cx/gamma + (lambda/gamma) R, C1(x) = cx/gamma.
 * Discounted costs: C0(x) = cx/(beta+gamma) + alpha (lambda/gamma) R,
 * C1(x) = cx/(beta+gamma); the penalty is the expected discounted charge of
 * an arrival that is turned away at the end of the sojourn.
 */
QueueModel build_queue_mdp(const QueueParams& params, Criterion criterion);

/// Accept iff x < x_star.
Policy threshold_policy(int x_star, int N);

/// Smallest x with pi(x) = reject if pi is accept-then-reject; nullopt otherwise.
std::optional<int> extract_threshold(const Policy& policy);

/// States averaged by the uniform metric: those with an admission choice, 0..N-1.
std::vector<std::size_t> uniform_states(int N);

/// Delta J(x) = Q_accept(x) - Q_reject(x) for x < N under value vector `values`.
std::vector<double> q_difference(const QueueModel& qm, const Vector& values);

/**
 * Scalar metrics of a queue policy in continuous-time units.
 *
 * eta_avg = nu_avg = J (cost per unit time). For each beta, nu_disc is the
 * mean of the discounted values over uniform_states(N) and eta_disc is
 * J^gamma / (1 - alpha) with J^gamma = J / gamma the per-period gain. The
 * report also checks phi^T J^alpha against the discounted model's own gain.
 */
MetricReport queue_metric_report(const QueueParams& params, const Policy& policy,
                                 std::span<const double> betas);

}  // namespace sysmdp::queue

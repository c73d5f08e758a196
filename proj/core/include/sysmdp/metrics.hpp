#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sysmdp/chain.hpp"
#include "sysmdp/model.hpp"

namespace sysmdp {

/// Stationary system-based metric phi^T J.
double eta(const Vector& phi, const Vector& values);

/// Uniform system-based metric: arithmetic mean of J.
double nu(const Vector& values);

/// Mean of J over the listed states only.
double nu(const Vector& values, std::span<const std::size_t> support);

/// Hybrid metric theta*eta + (1-theta)*nu for theta in [0, 1].
double xi(double eta_value, double nu_value, double theta);

/// eta^alpha = eta / (1 - alpha) for a unichain policy.
double eta_discounted_from_average(double eta_per_period, double alpha);

/**
 * phi^T (I - alpha P + alpha P*)^{-1} C + alpha/(1-alpha) phi^T P* C.
 *
 * Valid for any initial distribution phi and any (multi-chain) P; P* is the
 * Cesaro limit. Equals phi^T J^alpha exactly.
 */
double eta_discounted_multichain(const PolicyModel& pm, const Vector& phi, double alpha);

struct DiscountedMetrics {
    double alpha = 0.0;
    double eta_disc = 0.0;
    double nu_disc = 0.0;
    /// Interest rate, when the discount factor came from a continuous-time model.
    std::optional<double> beta;
};

struct HybridMetric {
    double theta = 0.0;
    double value = 0.0;
};

struct MetricReport {
    Policy policy;
    double eta_avg = 0.0;
    double nu_avg = 0.0;
    std::vector<DiscountedMetrics> discounted;
    std::optional<HybridMetric> xi;
};

struct MetricOptions {
    /// Initial distribution for eta when the policy's chain is multi-chain.
    std::optional<Vector> initial_distribution;
    /// States averaged by nu; all states when empty.
    std::vector<std::size_t> uniform_support;
    /// Relative tolerance of the eta^alpha = eta/(1-alpha) invariant.
    double invariant_tolerance = 1e-8;
};

/**
 * All scalar metrics of one policy. The same cost vector is used for the
 * average and discounted criteria, so eta_disc must equal eta_avg/(1-alpha);
 * the report throws NumericalError if that invariant fails.
 */
MetricReport metric_report(const MdpModel& model, const Policy& policy,
                           std::span<const double> alphas,
                           std::optional<double> theta = std::nullopt,
                           const MetricOptions& options = {});

}  // namespace sysmdp

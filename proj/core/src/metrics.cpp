#include "sysmdp/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sysmdp/linalg.hpp"
#include "sysmdp/solvers.hpp"

namespace sysmdp {

namespace {

void require_open_unit(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::domain_error("discount factor must lie in (0, 1)");
    }
}

bool close_relative(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

double eta(const Vector& phi, const Vector& values) {
    if (phi.size() != values.size()) {
        throw std::invalid_argument("eta: distribution and value vector lengths differ");
    }
    return phi.dot(values);
}

double nu(const Vector& values) {
    if (values.size() == 0) throw std::invalid_argument("nu: empty value vector");
    return values.mean();
}

double nu(const Vector& values, std::span<const std::size_t> support) {
    if (support.empty()) return nu(values);
    double sum = 0.0;
    for (auto s : support) {
        if (s >= static_cast<std::size_t>(values.size())) {
            throw std::invalid_argument("nu: support state out of range");
        }
        sum += values(static_cast<Eigen::Index>(s));
    }
    return sum / static_cast<double>(support.size());
}

double xi(double eta_value, double nu_value, double theta) {
    if (!(theta >= 0.0 && theta <= 1.0)) {
        throw std::domain_error("xi: theta must lie in [0, 1]");
    }
    return theta * eta_value + (1.0 - theta) * nu_value;
}

double eta_discounted_from_average(double eta_per_period, double alpha) {
    require_open_unit(alpha);
    return eta_per_period / (1.0 - alpha);
}

double eta_discounted_multichain(const PolicyModel& pm, const Vector& phi, double alpha) {
    require_open_unit(alpha);
    if (phi.size() != pm.transition.rows()) {
        throw std::invalid_argument("initial distribution length does not match the chain");
    }
    const auto n = pm.transition.rows();
    const Matrix star = cesaro_limit(pm.transition);
    const Matrix z = Matrix::Identity(n, n) - alpha * pm.transition + alpha * star;
    const Vector transient_part = linalg::solve(z, pm.cost);
    return phi.dot(transient_part) + alpha / (1.0 - alpha) * phi.dot(star * pm.cost);
}

MetricReport metric_report(const MdpModel& model, const Policy& policy,
                           std::span<const double> alphas, std::optional<double> theta,
                           const MetricOptions& options) {
    const PolicyModel pm = apply_policy(model, policy);
    const auto chain = classify_chain(pm.transition);

    MetricReport report;
    report.policy = policy;

    Vector phi;
    Vector gains;  // state-wise gain P* C
    if (chain.is_unichain) {
        phi = stationary_distribution(pm.transition).phi;
        const double gain = evaluate_average(pm).gain;
        gains = Vector::Constant(pm.transition.rows(), gain);
        report.eta_avg = gain;
    } else {
        if (!options.initial_distribution) {
            throw Error("policy induces a multi-chain; an initial distribution is required for eta");
        }
        phi = *options.initial_distribution;
        gains = cesaro_limit(pm.transition) * pm.cost;
        report.eta_avg = eta(phi, gains);
    }
    report.nu_avg = nu(gains, options.uniform_support);

    for (double alpha : alphas) {
        const auto disc = evaluate_discounted(pm, alpha);
        DiscountedMetrics m;
        m.alpha = alpha;
        m.eta_disc = eta(phi, disc.values);
        m.nu_disc = nu(disc.values, options.uniform_support);

        const double expected = chain.is_unichain
                                    ? eta_discounted_from_average(report.eta_avg, alpha)
                                    : eta_discounted_multichain(pm, phi, alpha);
        if (!close_relative(m.eta_disc, expected, options.invariant_tolerance)) {
            throw NumericalError("eta^alpha invariant violated at alpha " + std::to_string(alpha));
        }
        report.discounted.push_back(m);
    }

    if (chain.is_unichain && !close_relative(report.nu_avg, report.eta_avg, 1e-12)) {
        throw NumericalError("nu and eta differ on a unichain policy");
    }

    if (theta) report.xi = HybridMetric{*theta, xi(report.eta_avg, report.nu_avg, *theta)};
    return report;
}

}  // namespace sysmdp

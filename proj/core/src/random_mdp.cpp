#include "sysmdp/random_mdp.hpp"

#include <cmath>
#include <cstdlib>
#include <random>
#include <stdexcept>

#include "sysmdp/io.hpp"

#ifndef SYSMDP_DEFAULT_FIXTURES_DIR
#define SYSMDP_DEFAULT_FIXTURES_DIR "fixtures"
#endif

namespace sysmdp {

void RandomMdpSpec::validate() const {
    if (n_states == 0) throw std::invalid_argument("n_states must be positive");
    if (n_actions == 0) throw std::invalid_argument("n_actions must be positive");
    if (n_transient >= n_states) throw std::invalid_argument("n_transient must be < n_states");
    if (dirichlet_theta.size() != 1 && dirichlet_theta.size() != n_states) {
        throw std::invalid_argument("dirichlet_theta must have 1 or n_states entries");
    }
    for (double t : dirichlet_theta) {
        if (!(t > 0.0) || !std::isfinite(t)) {
            throw std::invalid_argument("dirichlet concentrations must be positive");
        }
    }
    if (!std::isfinite(cost_low) || !std::isfinite(cost_high) || !(cost_low < cost_high)) {
        throw std::invalid_argument("cost range must be finite with low < high");
    }
    if (!(zero_guard >= 0.0)) throw std::invalid_argument("zero_guard must be >= 0");
}

Vector sample_dirichlet(std::span<const double> theta, Rng& rng) {
    if (theta.empty()) throw std::invalid_argument("dirichlet: empty concentration vector");
    Vector y(static_cast<Eigen::Index>(theta.size()));
    for (std::size_t j = 0; j < theta.size(); ++j) {
        if (!(theta[j] > 0.0)) throw std::invalid_argument("dirichlet: concentrations must be > 0");
        std::gamma_distribution<double> gamma(theta[j], 1.0);
        y(static_cast<Eigen::Index>(j)) = gamma(rng);
    }
    const double total = y.sum();
    if (!(total > 0.0)) {
        // Every gamma variate underflowed (tiny theta); fall back to a vertex.
        y.setZero();
        y(0) = 1.0;
        return y;
    }
    return y / total;
}

MdpModel sample_random_mdp(const RandomMdpSpec& spec) {
    spec.validate();
    const auto n = static_cast<Eigen::Index>(spec.n_states);
    const auto n_rec = static_cast<Eigen::Index>(spec.n_states - spec.n_transient);

    std::vector<double> theta = spec.dirichlet_theta;
    if (theta.size() == 1) theta.assign(spec.n_states, theta.front());

    Rng rng(substream_seed(spec.seed, stream::kModel, 0));
    std::uniform_real_distribution<double> cost(spec.cost_low, spec.cost_high);

    MdpModel model;
    model.n_states = spec.n_states;
    std::vector<int> all(spec.n_actions);
    for (std::size_t a = 0; a < spec.n_actions; ++a) all[a] = static_cast<int>(a);
    model.actions.assign(spec.n_states, all);

    for (std::size_t a = 0; a < spec.n_actions; ++a) {
        Matrix p(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            Vector row = sample_dirichlet(theta, rng);
            // Rows of the recurrent block may not leak into transient states.
            const Eigen::Index width = i < n_rec ? n_rec : n;
            if (width < n) row.tail(n - width).setZero();
            row.head(width).array() += spec.zero_guard;
            p.row(i) = row / row.sum();
        }
        model.transitions.push_back(std::move(p));
    }
    for (std::size_t a = 0; a < spec.n_actions; ++a) {
        Vector c(n);
        for (Eigen::Index i = 0; i < n; ++i) c(i) = cost(rng);
        model.costs.push_back(std::move(c));
    }
    return model;
}

std::filesystem::path default_fixtures_dir() {
    if (const char* env = std::getenv("SYSMDP_FIXTURES_DIR"); env && *env) return env;
    return SYSMDP_DEFAULT_FIXTURES_DIR;
}

MdpModel load_reference_fixture() { return load_reference_fixture(default_fixtures_dir() / "random5.json"); }

MdpModel load_reference_fixture(const std::filesystem::path& file) {
    LoadOptions options;
    options.row_tolerance = kFixtureRowTolerance;
    options.renormalize = false;
    return load_model(file, options);
}

}  // namespace sysmdp

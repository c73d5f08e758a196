#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "sysmdp/model.hpp"
#include "sysmdp/rng.hpp"

namespace sysmdp {

/**
 * Parameters of a random MDP whose first n_states - n_transient states form
 * the single closed class of every P^a. Defaults (theta = 1, costs on
 * (0, 10)) are assumptions; the five-state fixture does not pin them down.
 */
struct RandomMdpSpec {
    std::size_t n_states = 5;
    std::size_t n_actions = 2;
    std::size_t n_transient = 0;
    /// One concentration for every column, or one per column.
    std::vector<double> dirichlet_theta{1.0};
    double cost_low = 0.0;
    double cost_high = 10.0;
    std::uint64_t seed = 0;
    /// Added to every structurally non-zero entry before renormalising.
    double zero_guard = 1e-9;

    /// Throws std::invalid_argument on an inconsistent spec.
    void validate() const;
};

/// Gamma(theta_j) variates normalised by their sum.
Vector sample_dirichlet(std::span<const double> theta, Rng& rng);

MdpModel sample_random_mdp(const RandomMdpSpec& spec);

/// Directory holding random5.json (compile-time default, overridable by SYSMDP_FIXTURES_DIR).
std::filesystem::path default_fixtures_dir();

/// Row-sum tolerance for the fixture, whose entries carry four decimals.
inline constexpr double kFixtureRowTolerance = 5e-4;

/// The five-state, two-action fixture with its four-decimal values kept as given.
MdpModel load_reference_fixture();
MdpModel load_reference_fixture(const std::filesystem::path& file);

}  // namespace sysmdp

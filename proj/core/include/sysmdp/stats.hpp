#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sysmdp {

struct SampleMeta {
    std::uint64_t seed = 0;
    std::size_t M = 0;
    std::optional<double> horizon;
    std::string metric;
    std::string initial;
    std::string policy;
    std::vector<std::pair<std::string, double>> params;
    std::string rng;
    /// Set on difference samples: the two parent labels and the shuffle seed.
    std::vector<std::string> parents;
    std::optional<std::uint64_t> shuffle_seed;

    /// Short human-readable label, e.g. "average/stationary/T16".
    std::string label() const;
};

struct SampleSet {
    std::vector<double> values;
    SampleMeta meta;

    std::size_t size() const noexcept { return values.size(); }
    /// Throws std::invalid_argument on an empty set or a non-finite value.
    void validate() const;
};

enum class Alternative { two_sided, less, greater };

std::string to_string(Alternative a);
Alternative parse_alternative(const std::string& s);

inline constexpr double kDefaultZeta = 0.05;

struct TestResult {
    std::string test;
    double statistic = 0.0;
    double p_value = 1.0;
    Alternative alternative = Alternative::two_sided;
    std::optional<double> dof;
    double zeta = kDefaultZeta;
    bool reject = false;
};

/// Population central moment (divisor M).
double central_moment(std::span<const double> x, int order);
double mean(std::span<const double> x);
/// Sample variance with divisor M - 1.
double sample_variance(std::span<const double> x);
/// g1 = m3 / m2^{3/2}.
double skewness(std::span<const double> x);
/// g2 = m4 / m2^2 (not excess).
double kurtosis(std::span<const double> x);

struct Summary {
    std::size_t count = 0;
    double mean = 0.0;
    double std = 0.0;  ///< divisor M - 1
    double min = 0.0;
    double max = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
};

Summary summarize(std::span<const double> x);

/// D'Agostino's omnibus k^2 = Z1(g1)^2 + Z2(g2)^2 against chi-square(2); needs M >= 20.
TestResult dagostino_k2(std::span<const double> x, double zeta = kDefaultZeta);

inline constexpr std::size_t kDagostinoMinSamples = 20;

TestResult t_test_one_sample(std::span<const double> x, double mu0, Alternative alt,
                             double zeta = kDefaultZeta);

/// Welch's unequal-variance t test of mean(X) - mean(Y).
TestResult welch_t_test(std::span<const double> x, std::span<const double> y, Alternative alt,
                        double zeta = kDefaultZeta);

struct UStatistics {
    double u_xy = 0.0;  ///< pairs with x > y, ties counted 1/2
    double u_yx = 0.0;
    double u() const { return u_xy < u_yx ? u_xy : u_yx; }
};

/// Rank-based U statistics in O(n log n).
UStatistics u_statistics(std::span<const double> x, std::span<const double> y);

/**
 * Mann-Whitney U with the tie-corrected normal approximation and continuity
 * correction. `less` is the alternative that X is stochastically smaller than Y.
 * The reported statistic is min(U_xy, U_yx).
 */
TestResult mann_whitney_u(std::span<const double> x, std::span<const double> y, Alternative alt,
                          double zeta = kDefaultZeta);

double pearson_correlation(std::span<const double> x, std::span<const double> y);

/// Fisher-Yates shuffle driven by substream `index` of the shuffle family.
void shuffle_in_place(std::vector<double>& values, std::uint64_t seed, std::uint64_t index);

/// Shuffles X and Y independently, then returns X - Y element-wise.
SampleSet difference_distribution(const SampleSet& x, const SampleSet& y,
                                  std::uint64_t shuffle_seed);

}  // namespace sysmdp

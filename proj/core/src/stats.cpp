#include "sysmdp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "sysmdp/rng.hpp"
#include "sysmdp/special.hpp"

namespace sysmdp {

namespace {

void require_size(std::span<const double> x, std::size_t n, const char* what) {
    if (x.size() < n) {
        throw std::invalid_argument(std::string(what) + " needs at least " + std::to_string(n) +
                                    " samples");
    }
}

// Tail probabilities of a symmetric reference distribution for an observed statistic.
template <class Sf>
double tail_p(double stat, Alternative alt, Sf&& sf) {
    switch (alt) {
        case Alternative::less: return sf(-stat);
        case Alternative::greater: return sf(stat);
        case Alternative::two_sided: return std::min(1.0, 2.0 * sf(std::abs(stat)));
    }
    return 1.0;
}

TestResult finish(TestResult r) {
    r.p_value = std::clamp(r.p_value, 0.0, 1.0);
    r.reject = r.p_value <= r.zeta;
    return r;
}

}  // namespace

std::string SampleMeta::label() const {
    std::string s = metric.empty() ? "sample" : metric;
    if (!initial.empty()) s += "/" + initial;
    if (!policy.empty()) s += "/" + policy;
    return s;
}

void SampleSet::validate() const {
    if (values.empty()) throw std::invalid_argument("sample set is empty");
    for (double v : values) {
        if (!std::isfinite(v)) throw std::invalid_argument("sample set contains a non-finite value");
    }
}

std::string to_string(Alternative a) {
    switch (a) {
        case Alternative::two_sided: return "two-sided";
        case Alternative::less: return "less";
        case Alternative::greater: return "greater";
    }
    return "?";
}

Alternative parse_alternative(const std::string& s) {
    if (s == "two-sided" || s == "two_sided") return Alternative::two_sided;
    if (s == "less") return Alternative::less;
    if (s == "greater") return Alternative::greater;
    throw std::invalid_argument("unknown alternative '" + s + "'");
}

double mean(std::span<const double> x) {
    require_size(x, 1, "mean");
    // Pairwise-stable enough for M in the millions; long double keeps the last digits honest.
    long double s = 0.0L;
    for (double v : x) s += v;
    return static_cast<double>(s / x.size());
}

double central_moment(std::span<const double> x, int order) {
    require_size(x, 1, "central moment");
    const double m = mean(x);
    long double s = 0.0L;
    for (double v : x) s += std::pow(static_cast<long double>(v - m), order);
    return static_cast<double>(s / x.size());
}

double sample_variance(std::span<const double> x) {
    require_size(x, 2, "sample variance");
    return central_moment(x, 2) * x.size() / (x.size() - 1.0);
}

double skewness(std::span<const double> x) {
    require_size(x, 2, "skewness");
    const double m2 = central_moment(x, 2);
    if (!(m2 > 0.0)) throw std::invalid_argument("skewness of a constant sample");
    return central_moment(x, 3) / std::pow(m2, 1.5);
}

double kurtosis(std::span<const double> x) {
    require_size(x, 2, "kurtosis");
    const double m2 = central_moment(x, 2);
    if (!(m2 > 0.0)) throw std::invalid_argument("kurtosis of a constant sample");
    return central_moment(x, 4) / (m2 * m2);
}

Summary summarize(std::span<const double> x) {
    require_size(x, 2, "summary");
    Summary s;
    s.count = x.size();
    s.mean = mean(x);
    s.std = std::sqrt(sample_variance(x));
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    s.min = *lo;
    s.max = *hi;
    s.skewness = skewness(x);
    s.excess_kurtosis = kurtosis(x) - 3.0;
    return s;
}

TestResult dagostino_k2(std::span<const double> x, double zeta) {
    require_size(x, kDagostinoMinSamples, "D'Agostino k^2");
    const double n = static_cast<double>(x.size());
    const double g1 = skewness(x);
    const double g2 = kurtosis(x);

    // Skewness transform.
    const double var_g1 = 6.0 * (n - 2) / ((n + 1) * (n + 3));
    const double gamma2_g1 =
        36.0 * (n - 7) * (n * n + 2 * n - 5) / ((n - 2) * (n + 5) * (n + 7) * (n + 9));
    const double w2 = std::sqrt(2.0 * gamma2_g1 + 4.0) - 1.0;
    const double z1 = std::asinh(g1 * std::sqrt((w2 - 1.0) / (2.0 * var_g1))) /
                      std::sqrt(0.5 * std::log(w2));

    // Kurtosis transform.
    const double mean_g2 = 3.0 * (n - 1) / (n + 1);
    const double var_g2 = 24.0 * n * (n - 2) * (n - 3) / ((n + 1) * (n + 1) * (n + 3) * (n + 5));
    const double std_x = (g2 - mean_g2) / std::sqrt(var_g2);
    const double root_b1 = 6.0 * (n * n - 5 * n + 2) / ((n + 7) * (n + 9)) *
                           std::sqrt(6.0 * (n + 3) * (n + 5) / (n * (n - 2) * (n - 3)));
    const double a = 6.0 + 8.0 / root_b1 * (2.0 / root_b1 + std::sqrt(1.0 + 4.0 / (root_b1 * root_b1)));
    const double ratio = (1.0 - 2.0 / a) / (1.0 + std_x * std::sqrt(2.0 / (a - 4.0)));
    const double z2 = (1.0 - 2.0 / (9.0 * a) - std::cbrt(ratio)) / std::sqrt(2.0 / (9.0 * a));

    TestResult r;
    r.test = "dagostino_k2";
    r.statistic = z1 * z1 + z2 * z2;
    r.dof = 2.0;
    r.zeta = zeta;
    r.p_value = special::chi2_sf(r.statistic, 2.0);
    return finish(r);
}

TestResult t_test_one_sample(std::span<const double> x, double mu0, Alternative alt, double zeta) {
    require_size(x, 2, "t test");
    const double n = static_cast<double>(x.size());
    const double sd = std::sqrt(sample_variance(x));
    if (!(sd > 0.0)) throw std::invalid_argument("t test of a zero-variance sample");
    TestResult r;
    r.test = "t_one_sample";
    r.statistic = (mean(x) - mu0) * std::sqrt(n) / sd;
    r.alternative = alt;
    r.dof = n - 1;
    r.zeta = zeta;
    r.p_value = tail_p(r.statistic, alt, [&](double t) { return special::t_sf(t, n - 1); });
    return finish(r);
}

TestResult welch_t_test(std::span<const double> x, std::span<const double> y, Alternative alt,
                        double zeta) {
    require_size(x, 2, "Welch t test");
    require_size(y, 2, "Welch t test");
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());
    const double sx2 = sample_variance(x) / nx;
    const double sy2 = sample_variance(y) / ny;
    if (!(sx2 + sy2 > 0.0)) throw std::invalid_argument("Welch t test of two constant samples");
    const double dof = (sx2 + sy2) * (sx2 + sy2) / (sx2 * sx2 / (nx - 1) + sy2 * sy2 / (ny - 1));
    TestResult r;
    r.test = "welch_t";
    r.statistic = (mean(x) - mean(y)) / std::sqrt(sx2 + sy2);
    r.alternative = alt;
    r.dof = dof;
    r.zeta = zeta;
    r.p_value = tail_p(r.statistic, alt, [&](double t) { return special::t_sf(t, dof); });
    return finish(r);
}

namespace {

struct RankSums {
    double rank_sum_x = 0.0;
    double tie_term = 0.0;  // sum of t^3 - t over tie groups
};

RankSums rank_sums(std::span<const double> x, std::span<const double> y) {
    std::vector<std::pair<double, bool>> all;
    all.reserve(x.size() + y.size());
    for (double v : x) all.emplace_back(v, true);
    for (double v : y) all.emplace_back(v, false);
    std::sort(all.begin(), all.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    RankSums out;
    std::size_t i = 0;
    while (i < all.size()) {
        std::size_t j = i;
        while (j < all.size() && all[j].first == all[i].first) ++j;
        const double group = static_cast<double>(j - i);
        const double avg_rank = (static_cast<double>(i) + 1.0 + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) {
            if (all[k].second) out.rank_sum_x += avg_rank;
        }
        out.tie_term += group * group * group - group;
        i = j;
    }
    return out;
}

}  // namespace

UStatistics u_statistics(std::span<const double> x, std::span<const double> y) {
    if (x.empty() || y.empty()) throw std::invalid_argument("Mann-Whitney U needs non-empty inputs");
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());
    const auto rs = rank_sums(x, y);
    UStatistics u;
    u.u_xy = rs.rank_sum_x - nx * (nx + 1) / 2;
    u.u_yx = nx * ny - u.u_xy;
    return u;
}

TestResult mann_whitney_u(std::span<const double> x, std::span<const double> y, Alternative alt,
                          double zeta) {
    if (x.empty() || y.empty()) throw std::invalid_argument("Mann-Whitney U needs non-empty inputs");
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());
    const double n = nx + ny;
    const auto rs = rank_sums(x, y);
    const double u_xy = rs.rank_sum_x - nx * (nx + 1) / 2;
    const double mu = nx * ny / 2;
    const double var = nx * ny / 12.0 * ((n + 1) - rs.tie_term / (n * (n - 1)));

    TestResult r;
    r.test = "mann_whitney_u";
    r.statistic = std::min(u_xy, nx * ny - u_xy);
    r.alternative = alt;
    r.zeta = zeta;
    if (!(var > 0.0)) {
        r.p_value = 1.0;
        return finish(r);
    }
    const double sd = std::sqrt(var);
    switch (alt) {
        case Alternative::less: r.p_value = special::normal_cdf((u_xy - mu + 0.5) / sd); break;
        case Alternative::greater: r.p_value = special::normal_sf((u_xy - mu - 0.5) / sd); break;
        case Alternative::two_sided:
            r.p_value = 2.0 * special::normal_sf((std::abs(u_xy - mu) - 0.5) / sd);
            break;
    }
    return finish(r);
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("correlation inputs differ in length");
    require_size(x, 2, "correlation");
    const double mx = mean(x);
    const double my = mean(y);
    long double sxy = 0.0L, sxx = 0.0L, syy = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const long double dx = x[i] - mx;
        const long double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (!(sxx > 0.0L && syy > 0.0L)) throw std::invalid_argument("correlation of a constant input");
    const double r = static_cast<double>(sxy / std::sqrt(sxx * syy));
    return std::clamp(r, -1.0, 1.0);
}

void shuffle_in_place(std::vector<double>& values, std::uint64_t seed, std::uint64_t index) {
    Rng rng(substream_seed(seed, stream::kShuffle, index));
    // Explicit Fisher-Yates with rejection sampling: std::shuffle is not portable across libraries.
    for (std::size_t i = values.size(); i > 1; --i) {
        const std::uint64_t bound = i;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t draw;
        do {
            draw = rng();
        } while (draw >= limit);
        std::swap(values[i - 1], values[draw % bound]);
    }
}

SampleSet difference_distribution(const SampleSet& x, const SampleSet& y,
                                  std::uint64_t shuffle_seed) {
    if (x.size() != y.size()) throw std::invalid_argument("difference of samples of unequal size");
    x.validate();
    auto xs = x.values;
    auto ys = y.values;
    shuffle_in_place(xs, shuffle_seed, 0);
    shuffle_in_place(ys, shuffle_seed, 1);

    SampleSet d;
    d.values.resize(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) d.values[i] = xs[i] - ys[i];
    d.meta.M = d.values.size();
    d.meta.seed = x.meta.seed;
    d.meta.horizon = x.meta.horizon;
    d.meta.metric = x.meta.metric;
    d.meta.initial = x.meta.initial;
    d.meta.policy = x.meta.policy + "-" + y.meta.policy;
    d.meta.params = x.meta.params;
    d.meta.rng = x.meta.rng;
    d.meta.parents = {x.meta.label(), y.meta.label()};
    d.meta.shuffle_seed = shuffle_seed;
    return d;
}

}  // namespace sysmdp

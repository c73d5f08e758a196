#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sysmdp/metrics.hpp"
#include "sysmdp/queue.hpp"
#include "sysmdp/simulation.hpp"
#include "sysmdp/stats.hpp"

// End-to-end admission-control study: solve the MDP policies, tabulate their
// theoretical metrics, simulate every (policy, metric, initial) cell and
// compare each MDP policy against the incumbent.
namespace sysmdp::study {

struct StudyConfig {
    /// Queue parameters; `params.beta` is ignored in favour of `betas`.
    queue::QueueParams params;
    /// One discounted policy is solved per interest rate.
    std::vector<double> betas{2e-3, 4e-4};
    int incumbent_threshold = 17;
    std::size_t M = 5000;
    /// Horizon of average-cost runs.
    double T = 5000.0;
    /// Discounted runs stop at ln(1/epsilon)/beta.
    double truncation_epsilon = 1e-6;
    std::uint64_t seed = 1;
    double zeta = kDefaultZeta;
    std::filesystem::path out = "sysmdp-study";
    unsigned threads = 0;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

/// Keys missing from the JSON keep their value from `base`; unknown keys are rejected.
StudyConfig parse_config(const std::string& json_text, StudyConfig base = {});
StudyConfig load_config(const std::filesystem::path& file, StudyConfig base = {});
std::string config_to_json(const StudyConfig& config);

struct StudyPolicy {
    /// "existing", "average" or "discounted_beta_<beta>".
    std::string name;
    Policy policy;
    std::optional<int> threshold;
    /// Interest rate the policy was solved for; empty for the incumbent and the average-cost policy.
    std::optional<double> beta;
    bool solved = false;
};

/// The incumbent first, then the average-cost policy, then one policy per beta.
std::vector<StudyPolicy> solve_policies(const StudyConfig& config);

/// Average cost first, then one discounted metric per beta.
std::vector<queue::PerformanceMetric> study_metrics(const StudyConfig& config);

/// Short metric name used in labels and file names: "average" or "beta_<beta>".
std::string metric_name(const queue::PerformanceMetric& metric);

/// "nu" for a uniform start, "eta" for a stationary one.
std::string initial_symbol(queue::InitialDistribution initial);

struct Cell {
    std::size_t policy = 0;
    std::size_t metric = 0;
    queue::InitialDistribution initial = queue::InitialDistribution::uniform;
};

/// Every policy under every metric from both initial distributions.
std::vector<Cell> all_cells(const StudyConfig& config, std::size_t n_policies);

/// The cells the comparisons need: the incumbent under every metric and each
/// MDP policy under the metric it was solved for.
std::vector<Cell> campaign_cells(const StudyConfig& config);

struct CellResult {
    Cell cell;
    std::string label;
    SampleSet samples;
    double theory = 0.0;
};

using Progress = std::function<void(const std::string&)>;

/**
 * Simulates the requested cells with common random numbers: every cell uses
 * the master seed, so cells whose policies coincide produce identical
 * samples and are simulated only once.
 */
std::vector<CellResult> simulate_cells(const StudyConfig& config,
                                       const std::vector<StudyPolicy>& policies,
                                       const std::vector<Cell>& cells,
                                       const Progress& progress = {});

/// "<policy>/<metric>/<nu|eta>".
std::string cell_label(const std::vector<StudyPolicy>& policies,
                       const std::vector<queue::PerformanceMetric>& metrics, const Cell& cell);

/// Theoretical expectation of a cell from the exact metric report.
double theory_value(const MetricReport& report, const Cell& cell);

struct Comparison {
    std::string label;
    std::string policy;
    std::string existing;
    std::string metric;
    queue::InitialDistribution initial = queue::InitialDistribution::uniform;
    /// D'Agostino k2 on the shuffled difference sample.
    TestResult normality;
    TestResult t_less, t_greater;
    TestResult u_less, u_greater;
    TestResult welch_less, welch_greater;
    /// Pearson correlation of the shuffled pair.
    double correlation = 0.0;
    double mean_difference = 0.0;
};

/// Compares an MDP policy sample against the incumbent's; "less" means the MDP policy is cheaper.
Comparison compare(const SampleSet& mdp, const SampleSet& existing, std::uint64_t shuffle_seed,
                   double zeta);

/// One comparison per metric and initial distribution, in metric-major order.
std::vector<Comparison> run_campaign(const StudyConfig& config,
                                     const std::vector<StudyPolicy>& policies,
                                     const std::vector<CellResult>& results);

/// Every test of every comparison, one row each.
std::string campaign_csv(const std::vector<Comparison>& rows);
std::string campaign_json(const std::vector<Comparison>& rows);

/// Mean, std, min, max, skewness and excess kurtosis of each cell next to its theory value.
std::string summary_csv(const std::vector<CellResult>& results);

/// Tables of nu (uniform) or eta (stationary) for each policy and metric, 6 decimals.
std::string theory_csv(const std::vector<StudyPolicy>& policies,
                       const std::vector<MetricReport>& reports, const StudyConfig& config,
                       queue::InitialDistribution initial);

std::vector<MetricReport> theory_reports(const StudyConfig& config,
                                         const std::vector<StudyPolicy>& policies);

std::string policies_json(const std::vector<StudyPolicy>& policies);

/// Shortest decimal form that round-trips, e.g. "0.002".
std::string shortest(double v);

struct StudyArtifacts {
    std::vector<StudyPolicy> policies;
    std::vector<MetricReport> reports;
    std::vector<CellResult> results;
    std::vector<Comparison> comparisons;
};

/// solve, metrics, simulate and test, writing every artifact under `config.out`.
StudyArtifacts run_study(const StudyConfig& config, const Progress& progress = {});

}  // namespace sysmdp::study

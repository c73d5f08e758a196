#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sysmdp/metrics.hpp"
#include "sysmdp/model.hpp"
#include "sysmdp/simulation.hpp"
#include "sysmdp/solvers.hpp"
#include "sysmdp/stats.hpp"

namespace sysmdp {

struct LoadOptions {
    /// Accepted |row sum - 1| after optional renormalisation.
    double row_tolerance = kRowSumTolerance;
    /// Rows within this of 1 are rescaled to sum to 1 exactly.
    double renormalize_below = 1e-9;
    bool renormalize = true;
};

/**
 * Model JSON: {"n_states", "actions": [[...] per state], "transitions":
 * [[[row]...] per action], "costs": [[...] per action]}. Throws Error with
 * every validation message when the model is malformed.
 */
MdpModel parse_model(const std::string& json_text, const LoadOptions& options = {});
MdpModel load_model(const std::filesystem::path& file, const LoadOptions& options = {});
std::string model_to_json(const MdpModel& model);
void save_model(const MdpModel& model, const std::filesystem::path& file);

/// Accepts "0,1,1" or a JSON array "[0,1,1]".
Policy parse_policy(const std::string& text);

std::string solution_to_json(const PolicyIterationResult<DiscountedSolution>& r);
std::string solution_to_json(const PolicyIterationResult<AverageSolution>& r);

/// Fixed six-decimal rendering used by every report table.
std::string fmt6(double v);

std::string metric_report_to_json(const MetricReport& report);
/// Header "policy,metric,alpha,beta,value"; one row per scalar metric.
std::string metric_report_to_csv(const std::vector<MetricReport>& reports);

/// CSV "index,cost" with full round-trip precision.
std::string sample_set_csv(const SampleSet& s);
std::string sample_set_sidecar_json(const SampleSet& s);
/// Writes `file` and `file` with ".json" appended.
void save_sample_set(const SampleSet& s, const std::filesystem::path& file);
/// Reads the CSV and, when present, its sidecar.
SampleSet load_sample_set(const std::filesystem::path& file);

/// CSV "x,dt,event,rejected".
std::string trajectory_csv(const queue::Trajectory& t);

std::string test_result_to_json(const TestResult& r);
std::string test_results_csv(const std::vector<std::pair<std::string, TestResult>>& rows);

/// Writes through a temporary file and renames, so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& file, const std::string& content);
std::string read_file(const std::filesystem::path& file);

}  // namespace sysmdp

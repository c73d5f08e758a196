#include "sysmdp/study.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "sysmdp/io.hpp"
#include "sysmdp/rng.hpp"
#include "sysmdp/solvers.hpp"

namespace sysmdp::study {

using nlohmann::ordered_json;
using queue::InitialDistribution;
using queue::PerformanceMetric;

namespace {

constexpr InitialDistribution kInitials[] = {InitialDistribution::uniform,
                                             InitialDistribution::stationary};

ordered_json test_json(const TestResult& r) { return ordered_json::parse(test_result_to_json(r)); }

}  // namespace

std::string shortest(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general);
    return std::string(buf, res.ptr);
}

void StudyConfig::validate() const {
    params.validate();
    if (betas.empty()) throw std::invalid_argument("betas must not be empty");
    std::set<double> seen;
    for (double b : betas) {
        if (!(b > 0.0) || !std::isfinite(b)) throw std::invalid_argument("every beta must be > 0");
        if (!seen.insert(b).second) throw std::invalid_argument("betas must be distinct");
    }
    if (incumbent_threshold < 0 || incumbent_threshold > params.N) {
        throw std::invalid_argument("threshold must lie in [0, N]");
    }
    if (M < 2) throw std::invalid_argument("M must be >= 2");
    if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("T must be > 0");
    if (!(truncation_epsilon > 0.0 && truncation_epsilon < 1.0)) {
        throw std::invalid_argument("epsilon must lie in (0, 1)");
    }
    if (!(zeta > 0.0 && zeta < 1.0)) throw std::invalid_argument("zeta must lie in (0, 1)");
    if (out.empty()) throw std::invalid_argument("output directory must not be empty");
}

StudyConfig parse_config(const std::string& json_text, StudyConfig base) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const ordered_json::parse_error& e) {
        throw Error(std::string("config does not parse: ") + e.what());
    }
    if (!j.is_object()) throw Error("config must be a JSON object");
    StudyConfig c = std::move(base);
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "lambda") c.params.lambda = value.get<double>();
            else if (key == "mu") c.params.mu = value.get<double>();
            else if (key == "c") c.params.c = value.get<double>();
            else if (key == "R") c.params.R = value.get<double>();
            else if (key == "N") c.params.N = value.get<int>();
            else if (key == "betas") c.betas = value.get<std::vector<double>>();
            else if (key == "threshold") c.incumbent_threshold = value.get<int>();
            else if (key == "M") c.M = value.get<std::size_t>();
            else if (key == "T") c.T = value.get<double>();
            else if (key == "epsilon") c.truncation_epsilon = value.get<double>();
            else if (key == "seed") c.seed = value.get<std::uint64_t>();
            else if (key == "zeta") c.zeta = value.get<double>();
            else if (key == "out") c.out = value.get<std::string>();
            else if (key == "threads") c.threads = value.get<unsigned>();
            else throw Error("unknown config key \"" + key + "\"");
        }
    } catch (const ordered_json::exception& e) {
        throw Error(std::string("config has a field of the wrong type: ") + e.what());
    }
    c.validate();
    return c;
}

StudyConfig load_config(const std::filesystem::path& file, StudyConfig base) {
    return parse_config(read_file(file), std::move(base));
}

std::string config_to_json(const StudyConfig& c) {
    ordered_json j;
    j["lambda"] = c.params.lambda;
    j["mu"] = c.params.mu;
    j["c"] = c.params.c;
    j["R"] = c.params.R;
    j["N"] = c.params.N;
    j["betas"] = c.betas;
    j["threshold"] = c.incumbent_threshold;
    j["M"] = c.M;
    j["T"] = c.T;
    j["epsilon"] = c.truncation_epsilon;
    j["seed"] = c.seed;
    j["zeta"] = c.zeta;
    j["out"] = c.out.generic_string();
    return j.dump(2) + "\n";
}

std::vector<StudyPolicy> solve_policies(const StudyConfig& config) {
    config.validate();
    std::vector<StudyPolicy> out;
    out.push_back({"existing", queue::threshold_policy(config.incumbent_threshold, config.params.N),
                   config.incumbent_threshold, std::nullopt, false});

    auto params = config.params;
    params.beta.reset();
    const auto avg = policy_iteration_average(queue::build_queue_mdp(params, queue::Criterion::average).model);
    out.push_back({"average", avg.policy, queue::extract_threshold(avg.policy), std::nullopt, true});

    for (double b : config.betas) {
        params.beta = b;
        const auto qm = queue::build_queue_mdp(params, queue::Criterion::discounted);
        const auto r = policy_iteration_discounted(qm.model, *qm.alpha);
        out.push_back({"discounted_beta_" + shortest(b), r.policy, queue::extract_threshold(r.policy), b,
                       true});
    }
    return out;
}

std::vector<PerformanceMetric> study_metrics(const StudyConfig& config) {
    std::vector<PerformanceMetric> m{PerformanceMetric::average()};
    for (double b : config.betas) m.push_back(PerformanceMetric::discounted(b));
    return m;
}

std::string metric_name(const PerformanceMetric& metric) {
    if (metric.kind == PerformanceMetric::Kind::average) return "average";
    return "beta_" + shortest(metric.beta);
}

std::string initial_symbol(InitialDistribution initial) {
    return initial == InitialDistribution::uniform ? "nu" : "eta";
}

std::vector<Cell> all_cells(const StudyConfig& config, std::size_t n_policies) {
    std::vector<Cell> cells;
    const std::size_t n_metrics = config.betas.size() + 1;
    for (std::size_t p = 0; p < n_policies; ++p) {
        for (std::size_t m = 0; m < n_metrics; ++m) {
            for (auto init : kInitials) cells.push_back({p, m, init});
        }
    }
    return cells;
}

std::vector<Cell> campaign_cells(const StudyConfig& config) {
    // Policy k + 1 is the MDP policy of metric k; policy 0 is the incumbent.
    std::vector<Cell> cells;
    const std::size_t n_metrics = config.betas.size() + 1;
    for (std::size_t m = 0; m < n_metrics; ++m) {
        for (auto init : kInitials) {
            cells.push_back({m + 1, m, init});
            cells.push_back({0, m, init});
        }
    }
    return cells;
}

std::string cell_label(const std::vector<StudyPolicy>& policies,
                       const std::vector<PerformanceMetric>& metrics, const Cell& cell) {
    return policies.at(cell.policy).name + "/" + metric_name(metrics.at(cell.metric)) + "/" +
           initial_symbol(cell.initial);
}

double theory_value(const MetricReport& report, const Cell& cell) {
    const bool uniform = cell.initial == InitialDistribution::uniform;
    if (cell.metric == 0) return uniform ? report.nu_avg : report.eta_avg;
    const auto& d = report.discounted.at(cell.metric - 1);
    return uniform ? d.nu_disc : d.eta_disc;
}

std::vector<MetricReport> theory_reports(const StudyConfig& config,
                                         const std::vector<StudyPolicy>& policies) {
    auto params = config.params;
    params.beta.reset();
    std::vector<MetricReport> reports;
    for (const auto& p : policies) reports.push_back(queue::queue_metric_report(params, p.policy, config.betas));
    return reports;
}

std::vector<CellResult> simulate_cells(const StudyConfig& config,
                                       const std::vector<StudyPolicy>& policies,
                                       const std::vector<Cell>& cells, const Progress& progress) {
    config.validate();
    const auto metrics = study_metrics(config);
    const auto reports = theory_reports(config, policies);
    auto params = config.params;
    params.beta.reset();

    using Key = std::tuple<std::vector<int>, std::size_t, InitialDistribution>;
    std::map<Key, SampleSet> cache;
    std::vector<CellResult> out;
    for (const auto& cell : cells) {
        const auto& sp = policies.at(cell.policy);
        const Key key{sp.policy.actions, cell.metric, cell.initial};
        auto it = cache.find(key);
        if (it == cache.end()) {
            const std::string label = cell_label(policies, metrics, cell);
            if (progress) progress("simulating " + label);
            queue::SamplingOptions opts;
            opts.average_horizon = config.T;
            opts.truncation_epsilon = config.truncation_epsilon;
            opts.threads = config.threads;
            opts.policy_tag = sp.name;
            it = cache.emplace(key, queue::sample_performance(params, sp.policy, metrics[cell.metric],
                                                              cell.initial, config.M, config.seed, opts))
                     .first;
        }
        CellResult r;
        r.cell = cell;
        r.label = cell_label(policies, metrics, cell);
        r.samples = it->second;
        r.samples.meta.policy = sp.name;
        r.theory = theory_value(reports.at(cell.policy), cell);
        out.push_back(std::move(r));
    }
    return out;
}

Comparison compare(const SampleSet& mdp, const SampleSet& existing, std::uint64_t shuffle_seed,
                   double zeta) {
    Comparison c;
    c.policy = mdp.meta.policy;
    c.existing = existing.meta.policy;
    const auto diff = difference_distribution(mdp, existing, shuffle_seed);

    // The same permutations as the difference sample, so the correlation describes the pairs used.
    auto xs = mdp.values;
    auto ys = existing.values;
    shuffle_in_place(xs, shuffle_seed, 0);
    shuffle_in_place(ys, shuffle_seed, 1);
    c.correlation = pearson_correlation(xs, ys);
    c.mean_difference = mean(diff.values);

    c.normality = dagostino_k2(diff.values, zeta);
    c.t_less = t_test_one_sample(diff.values, 0.0, Alternative::less, zeta);
    c.t_greater = t_test_one_sample(diff.values, 0.0, Alternative::greater, zeta);
    c.u_less = mann_whitney_u(mdp.values, existing.values, Alternative::less, zeta);
    c.u_greater = mann_whitney_u(mdp.values, existing.values, Alternative::greater, zeta);
    c.welch_less = welch_t_test(mdp.values, existing.values, Alternative::less, zeta);
    c.welch_greater = welch_t_test(mdp.values, existing.values, Alternative::greater, zeta);
    return c;
}

std::vector<Comparison> run_campaign(const StudyConfig& config,
                                     const std::vector<StudyPolicy>& policies,
                                     const std::vector<CellResult>& results) {
    const auto metrics = study_metrics(config);
    const auto find = [&](std::size_t policy, std::size_t metric, InitialDistribution init) -> const CellResult& {
        for (const auto& r : results) {
            if (r.cell.policy == policy && r.cell.metric == metric && r.cell.initial == init) return r;
        }
        throw std::invalid_argument("campaign cell was not simulated: " +
                                    cell_label(policies, metrics, {policy, metric, init}));
    };

    std::vector<Comparison> out;
    for (std::size_t m = 0; m < metrics.size(); ++m) {
        for (auto init : kInitials) {
            const auto& mdp = find(m + 1, m, init);
            const auto& existing = find(0, m, init);
            // One shuffle substream pair per comparison keeps the comparisons independent.
            const std::uint64_t shuffle_seed = substream_seed(config.seed, stream::kShuffle, out.size());
            auto c = compare(mdp.samples, existing.samples, shuffle_seed, config.zeta);
            c.metric = metric_name(metrics[m]);
            c.initial = init;
            c.label = initial_symbol(init) + "/" + c.metric + "/" + c.policy + "-" + c.existing;
            out.push_back(std::move(c));
        }
    }
    return out;
}

std::string campaign_csv(const std::vector<Comparison>& rows) {
    std::vector<std::pair<std::string, TestResult>> flat;
    for (const auto& c : rows) {
        for (const TestResult* r : {&c.normality, &c.t_less, &c.t_greater, &c.u_less, &c.u_greater,
                                    &c.welch_less, &c.welch_greater}) {
            flat.emplace_back(c.label, *r);
        }
    }
    return test_results_csv(flat);
}

std::string campaign_json(const std::vector<Comparison>& rows) {
    ordered_json a = ordered_json::array();
    for (const auto& c : rows) {
        ordered_json j;
        j["label"] = c.label;
        j["policy"] = c.policy;
        j["existing"] = c.existing;
        j["metric"] = c.metric;
        j["initial"] = queue::to_string(c.initial);
        j["mean_difference"] = c.mean_difference;
        j["correlation"] = c.correlation;
        j["normality"] = test_json(c.normality);
        j["outperformed"] = {{"t", test_json(c.t_less)},
                             {"u", test_json(c.u_less)},
                             {"welch", test_json(c.welch_less)}};
        j["outperforms"] = {{"t", test_json(c.t_greater)},
                            {"u", test_json(c.u_greater)},
                            {"welch", test_json(c.welch_greater)}};
        a.push_back(std::move(j));
    }
    return a.dump(2) + "\n";
}

std::string summary_csv(const std::vector<CellResult>& results) {
    std::string out = "distribution,policy,metric,initial,M,mean,std,min,max,skewness,kurtosis,theory,std_error\n";
    for (const auto& r : results) {
        const auto s = summarize(r.samples.values);
        const double se = s.std / std::sqrt(static_cast<double>(s.count));
        out += r.label + "," + r.samples.meta.policy + "," + r.samples.meta.metric + "," +
               r.samples.meta.initial + "," + std::to_string(s.count) + "," + fmt6(s.mean) + "," +
               fmt6(s.std) + "," + fmt6(s.min) + "," + fmt6(s.max) + "," + fmt6(s.skewness) + "," +
               fmt6(s.excess_kurtosis) + "," + fmt6(r.theory) + "," + fmt6(se) + "\n";
    }
    return out;
}

std::string theory_csv(const std::vector<StudyPolicy>& policies,
                       const std::vector<MetricReport>& reports, const StudyConfig& config,
                       InitialDistribution initial) {
    const std::string sym = initial_symbol(initial);
    std::string out = "policy,threshold," + sym;
    for (double b : config.betas) out += "," + sym + "_beta_" + shortest(b);
    out += "\n";
    const auto n_metrics = config.betas.size() + 1;
    for (std::size_t p = 0; p < policies.size(); ++p) {
        out += policies[p].name + "," +
               (policies[p].threshold ? std::to_string(*policies[p].threshold) : std::string("none"));
        for (std::size_t m = 0; m < n_metrics; ++m) out += "," + fmt6(theory_value(reports[p], {p, m, initial}));
        out += "\n";
    }
    return out;
}

std::string policies_json(const std::vector<StudyPolicy>& policies) {
    ordered_json a = ordered_json::array();
    for (const auto& p : policies) {
        ordered_json j;
        j["name"] = p.name;
        j["threshold"] = p.threshold ? ordered_json(*p.threshold) : ordered_json(nullptr);
        j["beta"] = p.beta ? ordered_json(*p.beta) : ordered_json(nullptr);
        j["solved"] = p.solved;
        j["policy"] = p.policy.actions;
        a.push_back(std::move(j));
    }
    return a.dump(2) + "\n";
}

StudyArtifacts run_study(const StudyConfig& config, const Progress& progress) {
    config.validate();
    StudyArtifacts a;
    a.policies = solve_policies(config);
    a.reports = theory_reports(config, a.policies);
    a.results = simulate_cells(config, a.policies, all_cells(config, a.policies.size()), progress);
    a.comparisons = run_campaign(config, a.policies, a.results);

    const auto& out = config.out;
    write_file_atomic(out / "config.json", config_to_json(config));
    write_file_atomic(out / "policies.json", policies_json(a.policies));
    write_file_atomic(out / "theory_uniform.csv", theory_csv(a.policies, a.reports, config, InitialDistribution::uniform));
    write_file_atomic(out / "theory_stationary.csv",
                      theory_csv(a.policies, a.reports, config, InitialDistribution::stationary));
    for (const auto& r : a.results) {
        std::string stem = r.label;
        for (char& ch : stem) {
            if (ch == '/') ch = '.';
        }
        save_sample_set(r.samples, out / "samples" / (stem + ".csv"));
    }
    write_file_atomic(out / "summary.csv", summary_csv(a.results));
    write_file_atomic(out / "tests.csv", campaign_csv(a.comparisons));
    write_file_atomic(out / "tests.json", campaign_json(a.comparisons));
    return a;
}

}  // namespace sysmdp::study

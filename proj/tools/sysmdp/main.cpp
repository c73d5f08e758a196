#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sysmdp/io.hpp"
#include "sysmdp/metrics.hpp"
#include "sysmdp/queue.hpp"
#include "sysmdp/random_mdp.hpp"
#include "sysmdp/solvers.hpp"
#include "sysmdp/stats.hpp"
#include "sysmdp/study.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace sysmdp;

namespace {

// Only the output directory may come from the environment.
constexpr const char* kOutEnv = "SYSMDP_OUT";

struct QueueFlags {
    std::optional<double> lambda, mu, c, R;
    std::optional<int> N;

    void add(CLI::App* app) {
        app->add_option("--lambda", lambda, "arrival rate");
        app->add_option("--mu", mu, "service rate");
        app->add_option("--c", c, "holding cost rate");
        app->add_option("--R", R, "rejection penalty");
        app->add_option("--N", N, "maximum queue length");
    }
    void apply(queue::QueueParams& p) const {
        if (lambda) p.lambda = *lambda;
        if (mu) p.mu = *mu;
        if (c) p.c = *c;
        if (R) p.R = *R;
        if (N) p.N = *N;
    }
};

struct StudyFlags {
    QueueFlags queue;
    std::string config_file;
    std::vector<double> betas;
    std::optional<int> threshold;
    std::optional<std::size_t> M;
    std::optional<double> T, epsilon, zeta;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::string out;

    void add(CLI::App* app) {
        queue.add(app);
        app->add_option("--config", config_file, "JSON study configuration")->check(CLI::ExistingFile);
        app->add_option("--beta", betas, "interest rates, one discounted policy each")->delimiter(',');
        app->add_option("--threshold", threshold, "threshold of the incumbent policy");
        app->add_option("--M", M, "trajectories per sample set");
        app->add_option("--T", T, "horizon of average-cost runs");
        app->add_option("--epsilon", epsilon, "discounted runs stop at ln(1/epsilon)/beta");
        app->add_option("--seed", seed, "master seed");
        app->add_option("--zeta", zeta, "significance level");
        app->add_option("--threads", threads, "simulation worker threads (0: one per core)");
        app->add_option("--out", out, "output directory");
    }

    study::StudyConfig resolve() const {
        study::StudyConfig c;
        if (!config_file.empty()) c = study::load_config(config_file, c);
        queue.apply(c.params);
        if (!betas.empty()) c.betas = betas;
        if (threshold) c.incumbent_threshold = *threshold;
        if (M) c.M = *M;
        if (T) c.T = *T;
        if (epsilon) c.truncation_epsilon = *epsilon;
        if (seed) c.seed = *seed;
        if (zeta) c.zeta = *zeta;
        if (threads) c.threads = *threads;
        if (const char* env = std::getenv(kOutEnv); env && *env) c.out = env;
        if (!out.empty()) c.out = out;
        c.validate();
        return c;
    }
};

void emit(const std::string& content, const std::string& file) {
    if (file.empty()) {
        std::cout << content;
    } else {
        write_file_atomic(file, content);
    }
}

void log(const std::string& msg) { std::cerr << msg << "\n"; }

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != ' ') {
            cur += ch;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

// ---- solve ---------------------------------------------------------------

struct SolveCmd {
    std::string model;
    bool use_queue = false;
    bool avg = false;
    bool disc = false;
    std::optional<double> alpha, beta;
    std::size_t distinguished = 0;
    QueueFlags q;
    std::string out;

    void add(CLI::App& root) {
        auto* app = root.add_subcommand("solve", "policy iteration on a model file or the queue");
        app->add_option("model", model, "model JSON or \"fixture\"")
            ->check(CLI::ExistingFile | CLI::IsMember({"fixture"}));
        app->add_flag("--queue", use_queue, "solve the admission-control queue");
        auto* a = app->add_flag("--avg", avg, "average-cost criterion");
        auto* d = app->add_flag("--disc", disc, "discounted criterion");
        a->excludes(d);
        app->add_option("--alpha", alpha, "discount factor");
        app->add_option("--beta", beta, "interest rate of the continuous-time queue");
        app->add_option("--distinguished-state", distinguished, "state whose bias is pinned to 0");
        q.add(app);
        app->add_option("--out", out, "write the JSON here instead of stdout");
        app->callback([this] { run(); });
    }

    void run() {
        if (use_queue == !model.empty()) throw CLI::ValidationError("give either a model file or --queue");
        if (avg == disc) throw CLI::ValidationError("choose one of --avg and --disc");

        MdpModel m;
        std::optional<double> a = alpha;
        queue::QueueParams params;
        if (use_queue) {
            q.apply(params);
            if (disc) {
                if (!beta) throw CLI::ValidationError("--disc --queue needs --beta");
                params.beta = *beta;
            }
            auto qm = queue::build_queue_mdp(params, disc ? queue::Criterion::discounted : queue::Criterion::average);
            m = std::move(qm.model);
            if (disc) a = qm.alpha;
        } else {
            m = model == "fixture" ? load_reference_fixture() : load_model(model, {kFixtureRowTolerance});
            if (disc && !a) throw CLI::ValidationError("--disc needs --alpha");
        }

        ordered_json j;
        Policy policy;
        if (disc) {
            const auto r = policy_iteration_discounted(m, *a);
            j = ordered_json::parse(solution_to_json(r));
            policy = r.policy;
        } else {
            const auto r = policy_iteration_average(m, distinguished);
            j = ordered_json::parse(solution_to_json(r));
            policy = r.policy;
        }
        if (use_queue) {
            const auto t = queue::extract_threshold(policy);
            j["threshold"] = t ? ordered_json(*t) : ordered_json(nullptr);
            if (params.beta) j["beta"] = *params.beta;
        }
        emit(j.dump(2) + "\n", out);
        if (!out.empty()) std::cout << "policy " << to_string(policy) << "\n";
    }
};

// ---- metrics -------------------------------------------------------------

struct MetricsCmd {
    std::string model;
    std::string policy;
    std::vector<double> alphas;
    std::optional<double> theta;
    bool use_queue = false;
    StudyFlags study;
    std::string format = "csv";
    std::string file;

    void add(CLI::App& root) {
        auto* app = root.add_subcommand("metrics", "eta, nu and their discounted forms for a policy");
        app->add_option("model", model, "model JSON or \"fixture\"")
            ->check(CLI::ExistingFile | CLI::IsMember({"fixture"}));
        app->add_option("--policy", policy, "actions per state, e.g. 0,0,0,1,0");
        app->add_option("--alphas", alphas, "discount factors")->delimiter(',');
        app->add_option("--theta", theta, "weight of eta in the hybrid metric");
        app->add_flag("--queue", use_queue, "tabulate the study policies of the queue");
        study.add(app);
        app->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        app->add_option("--file", file, "write the report here instead of stdout");
        app->callback([this] { run(); });
    }

    void run() {
        if (use_queue == !model.empty()) throw CLI::ValidationError("give either a model file or --queue");
        if (use_queue) {
            const auto config = study.resolve();
            const auto policies = study::solve_policies(config);
            const auto reports = study::theory_reports(config, policies);
            if (format == "json") {
                ordered_json a = ordered_json::array();
                for (const auto& r : reports) a.push_back(ordered_json::parse(metric_report_to_json(r)));
                emit(a.dump(2) + "\n", file);
                return;
            }
            emit(study::theory_csv(policies, reports, config, queue::InitialDistribution::uniform) + "\n" +
                     study::theory_csv(policies, reports, config, queue::InitialDistribution::stationary),
                 file);
            return;
        }
        if (policy.empty()) throw CLI::ValidationError("--policy is required with a model file");
        const auto m = model == "fixture" ? load_reference_fixture() : load_model(model, {kFixtureRowTolerance});
        const auto report = metric_report(m, parse_policy(policy), alphas, theta);
        emit(format == "json" ? metric_report_to_json(report) + "\n" : metric_report_to_csv({report}), file);
    }
};

// ---- simulate ------------------------------------------------------------

struct SimulateCmd {
    StudyFlags study;
    bool campaign_only = false;

    void add(CLI::App& root) {
        auto* app = root.add_subcommand("simulate", "sample sets for every policy, metric and initial distribution");
        study.add(app);
        app->add_flag("--campaign-only", campaign_only, "only the cells the comparisons need");
        app->callback([this] { run(); });
    }

    void run() {
        const auto config = study.resolve();
        const auto policies = study::solve_policies(config);
        const auto cells = campaign_only ? study::campaign_cells(config)
                                         : study::all_cells(config, policies.size());
        const auto results = study::simulate_cells(config, policies, cells, log);
        for (const auto& r : results) {
            std::string stem = r.label;
            for (char& ch : stem) {
                if (ch == '/') ch = '.';
            }
            save_sample_set(r.samples, config.out / "samples" / (stem + ".csv"));
        }
        const auto summary = study::summary_csv(results);
        write_file_atomic(config.out / "summary.csv", summary);
        std::cout << summary;
    }
};

// ---- test ----------------------------------------------------------------

struct TestCmd {
    std::string a, b;
    std::string tests = "t,welch,u,normality";
    std::string alternatives = "less,greater";
    double zeta = kDefaultZeta;
    std::optional<std::uint64_t> shuffle_seed;
    std::string out, csv;

    void add(CLI::App& root) {
        auto* app = root.add_subcommand("test", "compare sample set A (candidate) against B (incumbent)");
        app->add_option("A", a, "candidate sample CSV")->required();
        app->add_option("B", b, "incumbent sample CSV")->required();
        app->add_option("--tests", tests, "subset of t,welch,u,normality");
        app->add_option("--alternative", alternatives, "subset of less,greater,two-sided");
        app->add_option("--zeta", zeta, "significance level");
        app->add_option("--shuffle-seed", shuffle_seed, "seed of the shuffles before differencing");
        app->add_option("--out", out, "write the JSON report here instead of stdout");
        app->add_option("--csv", csv, "also write a CSV report");
        app->callback([this] { run(); });
    }

    void run() {
        // Load and validate everything before any output is produced.
        const auto x = load_sample_set(a);
        const auto y = load_sample_set(b);
        x.validate();
        y.validate();
        const auto names = split(tests);
        std::vector<Alternative> alts;
        for (const auto& s : split(alternatives)) alts.push_back(parse_alternative(s));
        for (const auto& n : names) {
            if (n != "t" && n != "welch" && n != "u" && n != "normality") {
                throw CLI::ValidationError("unknown test \"" + n + "\"");
            }
        }
        const bool paired = std::find(names.begin(), names.end(), "t") != names.end() ||
                            std::find(names.begin(), names.end(), "normality") != names.end();
        if (paired && x.size() != y.size()) throw Error("t and normality tests need samples of equal size");
        const std::uint64_t seed = shuffle_seed.value_or(x.meta.seed);

        std::vector<std::pair<std::string, TestResult>> rows;
        ordered_json report;
        report["A"] = x.meta.label();
        report["B"] = y.meta.label();
        report["shuffle_seed"] = seed;
        std::optional<SampleSet> diff;
        if (paired) {
            diff = difference_distribution(x, y, seed);
            auto xs = x.values;
            auto ys = y.values;
            shuffle_in_place(xs, seed, 0);
            shuffle_in_place(ys, seed, 1);
            report["correlation"] = pearson_correlation(xs, ys);
            report["mean_difference"] = mean(diff->values);
        }
        ordered_json results = ordered_json::array();
        const auto add = [&](const std::string& label, const TestResult& r) {
            rows.emplace_back(label, r);
            auto j = ordered_json::parse(test_result_to_json(r));
            results.push_back(j);
        };
        for (const auto& n : names) {
            if (n == "normality") {
                add("A-B", dagostino_k2(diff->values, zeta));
                continue;
            }
            for (auto alt : alts) {
                if (n == "t") add("A-B", t_test_one_sample(diff->values, 0.0, alt, zeta));
                if (n == "welch") add("A,B", welch_t_test(x.values, y.values, alt, zeta));
                if (n == "u") add("A,B", mann_whitney_u(x.values, y.values, alt, zeta));
            }
        }
        report["tests"] = results;
        if (!csv.empty()) write_file_atomic(csv, test_results_csv(rows));
        emit(report.dump(2) + "\n", out);
    }
};

// ---- randmdp -------------------------------------------------------------

struct RandMdpCmd {
    RandomMdpSpec spec;
    std::vector<double> theta;
    bool fixture = false;
    bool report = false;
    std::vector<std::string> report_policies;
    std::vector<double> alphas{0.2, 0.5, 0.75, 0.99};
    std::string out, report_file;

    void add(CLI::App& root) {
        auto* app = root.add_subcommand("randmdp", "sample a random unichain MDP or load the 5-state fixture");
        app->add_option("--states", spec.n_states, "number of states");
        app->add_option("--actions", spec.n_actions, "number of actions");
        app->add_option("--transient", spec.n_transient, "number of transient states");
        app->add_option("--seed", spec.seed, "seed");
        app->add_option("--theta", theta, "Dirichlet concentration (one value or one per state)")->delimiter(',');
        app->add_option("--cost-low", spec.cost_low, "lower bound of the uniform costs");
        app->add_option("--cost-high", spec.cost_high, "upper bound of the uniform costs");
        app->add_flag("--fixture", fixture, "use the bundled 5-state fixture");
        app->add_flag("--report", report, "tabulate J, eta, eta^alpha and phi for selected policies");
        app->add_option("--report-policy", report_policies, "policies to tabulate, e.g. 0,0,0,1,0");
        app->add_option("--alphas", alphas, "discount factors of the report")->delimiter(',');
        app->add_option("--out", out, "write the model JSON here instead of stdout");
        app->add_option("--report-file", report_file, "write the report here instead of stdout");
        app->callback([this] { run(); });
    }

    void run() {
        if (!theta.empty()) spec.dirichlet_theta = theta;
        const MdpModel m = fixture ? load_reference_fixture() : sample_random_mdp(spec);
        if (!report) {
            emit(model_to_json(m), out);
            return;
        }
        std::vector<Policy> policies;
        for (const auto& p : report_policies) policies.push_back(parse_policy(p));
        if (policies.empty() && fixture) {
            // The Blackwell-optimal e4, the gain-optimal zero policy and the sub-optimal all-ones.
            policies = {Policy({0, 0, 0, 1, 0}), Policy({0, 0, 0, 0, 0}), Policy({1, 1, 1, 1, 1})};
        }
        if (policies.empty()) policies.push_back(policy_iteration_average(m).policy);

        std::string csv = "policy,alpha";
        for (std::size_t x = 1; x <= m.n_states; ++x) csv += ",J" + std::to_string(x);
        csv += ",eta,eta_alpha\n";
        for (const auto& p : policies) {
            const auto r = metric_report(m, p, alphas);
            const auto pm = apply_policy(m, p);
            const std::string name = "\"" + to_string(p) + "\"";
            for (const auto& d : r.discounted) {
                csv += name + "," + fmt6(d.alpha);
                const auto j = evaluate_discounted(pm, d.alpha).values;
                for (Eigen::Index x = 0; x < j.size(); ++x) csv += "," + fmt6(j(x));
                csv += "," + fmt6(r.eta_avg) + "," + fmt6(d.eta_disc) + "\n";
            }
            csv += name + ",phi";
            const auto phi = stationary_distribution(pm.transition).phi;
            for (Eigen::Index x = 0; x < phi.size(); ++x) csv += "," + fmt6(phi(x));
            csv += ",,\n";
        }
        if (!out.empty()) write_file_atomic(out, model_to_json(m));
        emit(csv, report_file);
    }
};

// ---- study ---------------------------------------------------------------

struct StudyCmd {
    StudyFlags study;

    void add(CLI::App& root) {
        auto* app = root.add_subcommand("study", "solve, tabulate, simulate and test in one run");
        study.add(app);
        app->callback([this] { run(); });
    }

    void run() {
        const auto config = study.resolve();
        const auto a = study::run_study(config, log);
        for (const auto& p : a.policies) {
            std::cout << p.name << ": threshold "
                      << (p.threshold ? std::to_string(*p.threshold) : std::string("none")) << "\n";
        }
        std::cout << "\n" << study::summary_csv(a.results) << "\n";
        std::cout << "comparison,mean_difference,t_less_p,u_less_p,t_greater_p,u_greater_p\n";
        for (const auto& c : a.comparisons) {
            std::cout << c.label << "," << fmt6(c.mean_difference) << "," << fmt6(c.t_less.p_value) << ","
                      << fmt6(c.u_less.p_value) << "," << fmt6(c.t_greater.p_value) << ","
                      << fmt6(c.u_greater.p_value) << "\n";
        }
        std::cout << "\nartifacts in " << config.out.string() << "\n";
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scalar performance metrics for MDP policies and the queue admission study"};
    app.require_subcommand(1);
    SolveCmd solve;
    MetricsCmd metrics;
    SimulateCmd simulate;
    TestCmd test;
    RandMdpCmd randmdp;
    StudyCmd study;
    solve.add(app);
    metrics.add(app);
    simulate.add(app);
    test.add(app);
    randmdp.add(app);
    study.add(app);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "sysmdp: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

#include "sysmdp/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace sysmdp {

using nlohmann::json;

namespace {

json vector_json(const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json policy_json(const Policy& p) { return json(p.actions); }

std::string full_precision(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <class T>
T get_field(const json& j, const char* key) {
    if (!j.contains(key)) throw Error(std::string("model JSON is missing \"") + key + "\"");
    return j.at(key).get<T>();
}

std::string describe(const Violation& v) {
    std::string s = v.message;
    if (v.state) s += " (state " + std::to_string(*v.state);
    if (v.action) s += std::string(v.state ? ", " : " (") + "action " + std::to_string(*v.action);
    if (v.state || v.action) s += ")";
    return s;
}

}  // namespace

MdpModel parse_model(const std::string& json_text, const LoadOptions& options) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(std::string("model JSON does not parse: ") + e.what());
    }
    MdpModel m;
    try {
        m.n_states = get_field<std::size_t>(j, "n_states");
        m.actions = get_field<std::vector<std::vector<int>>>(j, "actions");
        const auto p = get_field<std::vector<std::vector<std::vector<double>>>>(j, "transitions");
        const auto c = get_field<std::vector<std::vector<double>>>(j, "costs");
        for (const auto& rows : p) {
            Matrix mat(static_cast<Eigen::Index>(rows.size()),
                       rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (rows[r].size() != static_cast<std::size_t>(mat.cols())) {
                    throw Error("ragged transition matrix in model JSON");
                }
                for (std::size_t k = 0; k < rows[r].size(); ++k) {
                    mat(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = rows[r][k];
                }
            }
            m.transitions.push_back(std::move(mat));
        }
        for (const auto& cv : c) {
            m.costs.push_back(Eigen::Map<const Vector>(cv.data(), static_cast<Eigen::Index>(cv.size())));
        }
    } catch (const json::exception& e) {
        throw Error(std::string("model JSON has the wrong shape: ") + e.what());
    }

    if (options.renormalize) {
        for (auto& mat : m.transitions) {
            for (Eigen::Index r = 0; r < mat.rows(); ++r) {
                // Rows already within tolerance are left alone so a save/load cycle is exact.
                const double s = mat.row(r).sum();
                const double off = std::abs(s - 1.0);
                if (s > 0.0 && off > options.row_tolerance && off < options.renormalize_below) {
                    mat.row(r) /= s;
                }
            }
        }
    }

    const auto violations = validate_model(m, options.row_tolerance);
    if (!violations.empty()) {
        std::string msg = "invalid model:";
        for (const auto& v : violations) msg += "\n  " + describe(v);
        throw Error(msg);
    }
    return m;
}

MdpModel load_model(const std::filesystem::path& file, const LoadOptions& options) {
    return parse_model(read_file(file), options);
}

std::string model_to_json(const MdpModel& model) {
    json j;
    j["n_states"] = model.n_states;
    j["actions"] = model.actions;
    json p = json::array();
    for (const auto& mat : model.transitions) {
        json rows = json::array();
        for (Eigen::Index r = 0; r < mat.rows(); ++r) rows.push_back(vector_json(mat.row(r).transpose()));
        p.push_back(rows);
    }
    j["transitions"] = p;
    json c = json::array();
    for (const auto& v : model.costs) c.push_back(vector_json(v));
    j["costs"] = c;
    return j.dump(2) + "\n";
}

void save_model(const MdpModel& model, const std::filesystem::path& file) {
    write_file_atomic(file, model_to_json(model));
}

Policy parse_policy(const std::string& text) {
    std::string s;
    for (char ch : text) {
        if (ch != '[' && ch != ']' && ch != ' ') s += ch;
    }
    std::vector<int> actions;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        int v = 0;
        const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
        if (res.ec != std::errc() || res.ptr != item.data() + item.size()) {
            throw std::invalid_argument("bad policy entry '" + item + "'");
        }
        actions.push_back(v);
    }
    if (actions.empty()) throw std::invalid_argument("empty policy");
    return Policy(std::move(actions));
}

std::string solution_to_json(const PolicyIterationResult<DiscountedSolution>& r) {
    json j;
    j["policy"] = policy_json(r.policy);
    j["alpha"] = r.solution.alpha;
    j["values"] = vector_json(r.solution.values);
    j["residual"] = r.solution.residual;
    j["iterations"] = r.iterations;
    return j.dump(2) + "\n";
}

std::string solution_to_json(const PolicyIterationResult<AverageSolution>& r) {
    json j;
    j["policy"] = policy_json(r.policy);
    j["gain"] = r.solution.gain;
    j["bias"] = vector_json(r.solution.bias);
    j["distinguished_state"] = r.solution.distinguished_state;
    j["residual"] = r.solution.residual;
    j["iterations"] = r.iterations;
    return j.dump(2) + "\n";
}

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string metric_report_to_json(const MetricReport& report) {
    json j;
    j["policy"] = policy_json(report.policy);
    j["eta"] = report.eta_avg;
    j["nu"] = report.nu_avg;
    json d = json::array();
    for (const auto& m : report.discounted) {
        json e;
        e["alpha"] = m.alpha;
        if (m.beta) e["beta"] = *m.beta;
        e["eta"] = m.eta_disc;
        e["nu"] = m.nu_disc;
        d.push_back(e);
    }
    j["discounted"] = d;
    if (report.xi) j["xi"] = {{"theta", report.xi->theta}, {"value", report.xi->value}};
    return j.dump(2) + "\n";
}

std::string metric_report_to_csv(const std::vector<MetricReport>& reports) {
    std::string out = "policy,metric,alpha,beta,value\n";
    for (const auto& r : reports) {
        const std::string p = "\"" + to_string(r.policy) + "\"";
        out += p + ",eta,,," + fmt6(r.eta_avg) + "\n";
        out += p + ",nu,,," + fmt6(r.nu_avg) + "\n";
        for (const auto& m : r.discounted) {
            const std::string a = fmt6(m.alpha);
            const std::string b = m.beta ? full_precision(*m.beta) : "";
            out += p + ",eta_disc," + a + "," + b + "," + fmt6(m.eta_disc) + "\n";
            out += p + ",nu_disc," + a + "," + b + "," + fmt6(m.nu_disc) + "\n";
        }
        if (r.xi) out += p + ",xi," + fmt6(r.xi->theta) + ",," + fmt6(r.xi->value) + "\n";
    }
    return out;
}

std::string sample_set_csv(const SampleSet& s) {
    std::string out = "index,cost\n";
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        out += std::to_string(i) + "," + full_precision(s.values[i]) + "\n";
    }
    return out;
}

std::string sample_set_sidecar_json(const SampleSet& s) {
    json j;
    j["seed"] = s.meta.seed;
    j["M"] = s.meta.M;
    j["T"] = s.meta.horizon ? json(*s.meta.horizon) : json(nullptr);
    j["metric"] = s.meta.metric;
    j["initial"] = s.meta.initial;
    j["policy"] = s.meta.policy;
    json params = json::object();
    for (const auto& [k, v] : s.meta.params) params[k] = v;
    j["params"] = params;
    j["rng"] = s.meta.rng;
    if (!s.meta.parents.empty()) j["parents"] = s.meta.parents;
    if (s.meta.shuffle_seed) j["shuffle_seed"] = *s.meta.shuffle_seed;
    return j.dump(2) + "\n";
}

void save_sample_set(const SampleSet& s, const std::filesystem::path& file) {
    write_file_atomic(file, sample_set_csv(s));
    write_file_atomic(file.string() + ".json", sample_set_sidecar_json(s));
}

SampleSet load_sample_set(const std::filesystem::path& file) {
    std::istringstream in(read_file(file));
    std::string line;
    if (!std::getline(in, line) || line.rfind("index,cost", 0) != 0) {
        throw Error("sample file " + file.string() + " lacks the index,cost header");
    }
    SampleSet s;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw Error(file.string() + ":" + std::to_string(lineno) + ": expected index,cost");
        }
        try {
            s.values.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw Error(file.string() + ":" + std::to_string(lineno) + ": bad cost value");
        }
    }
    s.meta.M = s.values.size();
    const std::filesystem::path sidecar = file.string() + ".json";
    if (std::filesystem::exists(sidecar)) {
        const json j = json::parse(read_file(sidecar));
        s.meta.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("T") && !j["T"].is_null()) s.meta.horizon = j["T"].get<double>();
        s.meta.metric = j.value("metric", std::string{});
        s.meta.initial = j.value("initial", std::string{});
        s.meta.policy = j.value("policy", std::string{});
        s.meta.rng = j.value("rng", std::string{});
        if (j.contains("params")) {
            for (const auto& [k, v] : j["params"].items()) s.meta.params.emplace_back(k, v.get<double>());
        }
    } else {
        s.meta.policy = file.stem().string();
    }
    s.validate();
    return s;
}

std::string trajectory_csv(const queue::Trajectory& t) {
    std::string out = "x,dt,event,rejected\n";
    for (const auto& r : t.records) {
        out += std::to_string(r.state) + "," + full_precision(r.dt) + "," +
               (r.event == queue::Event::arrival ? "arrival" : "service") + "," +
               (r.rejected ? "1" : "0") + "\n";
    }
    return out;
}

std::string test_result_to_json(const TestResult& r) {
    json j;
    j["test"] = r.test;
    j["statistic"] = r.statistic;
    j["p_value"] = r.p_value;
    j["alternative"] = to_string(r.alternative);
    j["dof"] = r.dof ? json(*r.dof) : json(nullptr);
    j["zeta"] = r.zeta;
    j["reject"] = r.reject;
    return j.dump();
}

std::string test_results_csv(const std::vector<std::pair<std::string, TestResult>>& rows) {
    std::string out = "label,test,alternative,statistic,p_value,dof,zeta,reject\n";
    for (const auto& [label, r] : rows) {
        out += label + "," + r.test + "," + to_string(r.alternative) + "," + fmt6(r.statistic) + "," +
               fmt6(r.p_value) + "," + (r.dof ? fmt6(*r.dof) : "") + "," + fmt6(r.zeta) + "," +
               (r.reject ? "True" : "False") + "\n";
    }
    return out;
}

void write_file_atomic(const std::filesystem::path& file, const std::string& content) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    const std::filesystem::path tmp = file.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
        if (!out) throw Error("write to " + tmp.string() + " failed");
    }
    std::filesystem::rename(tmp, file);
}

std::string read_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot open " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace sysmdp

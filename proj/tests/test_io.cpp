#include <doctest.h>

#include <filesystem>

#include "sysmdp/io.hpp"
#include "sysmdp/random_mdp.hpp"
#include "support.hpp"

using namespace sysmdp;
using namespace testing;

namespace {

std::filesystem::path scratch_dir() {
    auto d = std::filesystem::temp_directory_path() / "sysmdp_io_test";
    std::filesystem::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("model JSON round trip") {
    RandomMdpSpec s;
    s.seed = 3;
    s.n_transient = 1;
    const auto m = sample_random_mdp(s);
    const auto back = parse_model(model_to_json(m));
    CHECK(back.n_states == m.n_states);
    CHECK(back.actions == m.actions);
    for (std::size_t a = 0; a < m.n_actions(); ++a) {
        CHECK(back.transitions[a] == m.transitions[a]);
        CHECK(back.costs[a] == m.costs[a]);
    }
    const auto file = scratch_dir() / "model.json";
    save_model(m, file);
    CHECK(load_model(file).transitions[0] == m.transitions[0]);
}

TEST_CASE("loader renormalises only float dust") {
    const std::string tiny = R"({"n_states":1,"actions":[[0]],"transitions":[[[1.0000000001]]],"costs":[[1]]})";
    CHECK(parse_model(tiny).transitions[0](0, 0) == 1.0);
    const std::string bad = R"({"n_states":2,"actions":[[0],[0]],"transitions":[[[0.5,0.4],[0,1]]],"costs":[[1,1]]})";
    CHECK_THROWS_WITH_AS(parse_model(bad), doctest::Contains("row sum 0.9"), Error);
    CHECK_THROWS_AS(parse_model("{not json"), Error);
    CHECK_THROWS_AS(parse_model(R"({"n_states":1})"), Error);
}

TEST_CASE("policy parsing") {
    CHECK(parse_policy("0,0,0,1,0") == fixture_policy({3}));
    CHECK(parse_policy("[1, 0]") == Policy({1, 0}));
    CHECK_THROWS_AS(parse_policy("1,x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_policy(""), std::invalid_argument);
}

TEST_CASE("solution JSON carries the documented keys") {
    const auto m = load_reference_fixture();
    const auto d = solution_to_json(policy_iteration_discounted(m, 0.5));
    for (const char* key : {"\"policy\"", "\"alpha\"", "\"values\"", "\"residual\"", "\"iterations\""}) {
        CHECK(d.find(key) != std::string::npos);
    }
    const auto a = solution_to_json(policy_iteration_average(m));
    for (const char* key : {"\"gain\"", "\"bias\""}) CHECK(a.find(key) != std::string::npos);
}

TEST_CASE("six-decimal formatting") {
    CHECK(fmt6(26.4513) == "26.451300");
    CHECK(fmt6(-0.5) == "-0.500000");
}

TEST_CASE("sample set round trip with sidecar") {
    SampleSet s;
    s.values = {1.0 / 3, 2.5, 1e-7};
    s.meta.seed = 42;
    s.meta.M = 3;
    s.meta.horizon = 5000.0;
    s.meta.metric = "average";
    s.meta.initial = "uniform";
    s.meta.policy = "T17";
    s.meta.params = {{"lambda", 1.0}};
    const auto file = scratch_dir() / "s.csv";
    save_sample_set(s, file);
    CHECK(std::filesystem::exists(file.string() + ".json"));
    const auto back = load_sample_set(file);
    CHECK(back.values == s.values);
    CHECK(back.meta.seed == 42);
    CHECK(back.meta.horizon == std::optional<double>(5000.0));
    CHECK(back.meta.policy == "T17");
    CHECK(read_file(file).rfind("index,cost\n0,", 0) == 0);
    CHECK_THROWS_AS(load_sample_set(scratch_dir() / "missing.csv"), Error);
}

TEST_CASE("trajectory and test-result exports") {
    queue::Trajectory t;
    t.records = {{0, 0.5, queue::Event::arrival, true}};
    CHECK(trajectory_csv(t) == "x,dt,event,rejected\n0,0.5,arrival,1\n");

    TestResult r;
    r.test = "t_one_sample";
    r.statistic = -1.5;
    r.p_value = 0.07;
    r.alternative = Alternative::less;
    r.dof = 4999;
    const auto csv = test_results_csv({{"Average", r}});
    CHECK(csv.find("Average,t_one_sample,less,-1.500000,0.070000,4999.000000,0.050000,False") !=
          std::string::npos);
    CHECK(test_result_to_json(r).find("\"alternative\":\"less\"") != std::string::npos);
}

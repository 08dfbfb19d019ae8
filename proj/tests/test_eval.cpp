#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "taskloop/eval.hpp"
#include "test_util.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

using namespace taskloop;
using namespace taskloop::eval;
namespace fs = std::filesystem;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    std::string path = (fs::temp_directory_path() / name).string();
    std::ofstream out(path, std::ios::trunc);
    out << content;
    return path;
}

orchestrator::Attempt attempt(const std::string& kind) {
    orchestrator::Attempt a;
    a.kind = kind;
    return a;
}

}  // namespace

TEST_CASE("the shipped dataset loads with its documented split sizes") {
    auto cat = testutil::catalog();
    auto tuples = load_dataset(testutil::dataset_path(), cat);
    CHECK(tuples.size() == 70);
    CHECK(filter_split(tuples, Split::TRAIN).size() == 35);
    CHECK(filter_split(tuples, Split::VALIDATION).size() == 25);
    CHECK(filter_split(tuples, Split::TEST).size() == 10);
    for (const auto& t : filter_split(tuples, Split::TEST)) {
        CHECK_FALSE(t.relevant_objects.empty());
        CHECK_FALSE(t.script_lines.empty());
    }
}

TEST_CASE("dataset schema violations name the offending line") {
    auto cat = testutil::catalog();
    auto expect_error = [&](const std::string& line, const std::string& needle) {
        std::string path = write_temp("eval_bad.jsonl", line + "\n");
        try {
            load_dataset(path, cat);
            FAIL("expected SchemaError for: " << line);
        } catch (const SchemaError& e) {
            CAPTURE(needle);
            CHECK(std::string(e.what()).find(":1:") != std::string::npos);
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expect_error("not json", "invalid JSON");
    expect_error(R"({"description": "x", "split": "TRAIN", "scene": "s"})", "missing id");
    expect_error(R"({"id": "a", "description": "x", "split": "WEEKDAYS", "scene": "s"})",
                 "unknown split");
    expect_error(R"js({"id": "a", "description": "x", "split": "TRAIN", "scene": "s", "script": ["[FLY] <x> (1)"]})js",
                 "script line 1");
    expect_error(R"({"id": "a", "description": "x", "split": "TEST", "scene": "s"})",
                 "relevant_objects");
    expect_error(R"({"id": "a", "description": "x", "split": "TEST", "scene": "s", "relevant_objects": ["???"]})",
                 "malformed relevant object");
}

TEST_CASE("exemplars come from the TRAIN split only") {
    auto cat = testutil::catalog();
    auto tuples = load_dataset(testutil::dataset_path(), cat);
    auto sets = exemplars_from_dataset(tuples);
    CHECK(sets.planning.size() == 3);
    CHECK(sets.body.size() == 12);
    CHECK_FALSE(sets.feedback.empty());
    // Body exemplars pair a plan step with exactly one command line.
    for (const auto& ex : sets.body) {
        CHECK(ex.output.find('[') == 0);
    }
    // No TEST description leaks into the planning exemplars.
    for (const auto& ex : sets.planning) {
        for (const auto& t : filter_split(tuples, Split::TEST)) {
            CHECK(ex.input != t.description);
        }
    }
}

TEST_CASE("exec score counts only concrete commands") {
    orchestrator::EpisodeTrace trace;
    CHECK(exec_score(trace) == 1.0);  // no attempts at all

    trace.attempts = {attempt("ok"), attempt("exec_error"), attempt("pass"),
                      attempt("parse_error"), attempt("plan_parse_error"), attempt("ok")};
    CHECK(exec_score(trace) == doctest::Approx(2.0 / 3.0));

    orchestrator::EpisodeTrace all_skipped;
    all_skipped.attempts = {attempt("pass"), attempt("parse_error")};
    CHECK(exec_score(all_skipped) == 1.0);
    // Re-evaluation is pure.
    CHECK(exec_score(trace) == exec_score(trace));
}

TEST_CASE("goal conditions derive from the reference script diff") {
    auto cat = testutil::catalog();
    auto tuples = load_dataset(testutil::dataset_path(), cat);
    const TaskTuple* light = nullptr;
    for (const auto& t : tuples) {
        if (t.id == "turn_off_light") light = &t;
    }
    REQUIRE(light != nullptr);
    auto tgc = goal_conditions(*light, testutil::scene_path(), cat);
    REQUIRE(tgc.size() == 2);

    household::ConditionSet expected;
    expected.insert(household::Condition{true, household::Condition::Kind::State,
                                         ObjectRef{"light", 1}, household::BinState::OFF, {}, {}});
    expected.insert(household::Condition{false, household::Condition::Kind::State,
                                         ObjectRef{"light", 1}, household::BinState::ON, {}, {}});
    CHECK(tgc == expected);

    TaskTuple broken = *light;
    broken.script_lines = {"[GRAB] <milk> (1)"};  // fails from the door
    CHECK_THROWS_AS(goal_conditions(broken, testutil::scene_path(), cat), DatasetError);
}

TEST_CASE("gcr/sr/csr agree with a brute-force oracle on randomized scenes") {
    auto cat = testutil::catalog();
    std::mt19937 rng(77);
    int cases = 0;
    for (int round = 0; round < 60; ++round) {
        std::string scene = testutil::random_scene_json(rng);
        auto reference = household::HouseholdEnv::from_json_text(scene, cat);
        household::WorldState initial = reference->state();
        auto refs = testutil::object_refs(initial);
        for (int i = 0; i < 25; ++i) {
            reference->execute_command(testutil::random_command(rng, cat, refs));
        }
        household::ConditionSet tgc = household::state_diff(initial, reference->state());

        // An independent random walk produces the state under evaluation.
        auto env = household::HouseholdEnv::from_json_text(scene, cat);
        for (int i = 0; i < 15; ++i) {
            env->execute_command(testutil::random_command(rng, cat, refs));
        }

        double got = gcr(env->state(), tgc);
        double want = testutil::gcr_oracle(env->state(), tgc);
        CHECK(got == want);  // exact, both are ratios of the same integers

        std::vector<ObjectRef> relevant = {refs[rng() % refs.size()]};
        auto [sr, csr] = sr_and_csr(env->state(), tgc, relevant);
        CHECK((sr == 1) == (got == 1.0));
        CHECK(csr >= sr);

        // CSR oracle: only conditions touching the relevant object matter.
        int relevant_unsat = 0;
        for (const auto& c : tgc) {
            bool touches = c.subject == relevant[0] ||
                           (c.kind == household::Condition::Kind::Rel && c.object == relevant[0]);
            if (touches && !testutil::condition_holds_oracle(env->state(), c)) ++relevant_unsat;
        }
        CHECK(csr == (relevant_unsat == 0 ? 1 : 0));
        ++cases;
    }
    CHECK(cases >= 60);
}

TEST_CASE("csr without annotations is a missing-annotation error") {
    auto env = testutil::apartment();
    CHECK_THROWS_AS(sr_and_csr(env->state(), {}, {}), MissingAnnotation);
}

TEST_CASE("report aggregation matches an independent two-pass computation") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> value(0.0, 1.0);
    MetricsReport report;
    for (int r = 0; r < 7; ++r) {
        RunMetrics run;
        run.run_index = r;
        for (int t = 0; t < 9; ++t) {
            TaskMetrics m;
            m.task_id = "task" + std::to_string(t);
            m.exec = value(rng);
            m.gcr = value(rng);
            m.sr = rng() % 2;
            m.csr = rng() % 2;
            run.tasks.push_back(m);
        }
        report.runs.push_back(run);
    }
    std::vector<double> exec_means, gcr_means;
    for (const auto& r : report.runs) {
        exec_means.push_back(r.mean_exec());
        gcr_means.push_back(r.mean_gcr());
    }
    MeanStd exec_oracle = mean_std_two_pass(exec_means);
    MeanStd gcr_oracle = mean_std_two_pass(gcr_means);
    CHECK(std::abs(report.exec().mean - exec_oracle.mean) < 1e-12);
    CHECK(std::abs(report.exec().stddev - exec_oracle.stddev) < 1e-12);
    CHECK(std::abs(report.gcr().mean - gcr_oracle.mean) < 1e-12);
    CHECK(std::abs(report.gcr().stddev - gcr_oracle.stddev) < 1e-12);
}

TEST_CASE("scripted suites are deterministic across runs and jobs") {
    SuiteConfig config = testutil::suite_config(3, 3);
    SuiteResult a = run_suite(config);
    CHECK(a.backend_errors == 0);
    CHECK(a.report.runs.size() == 3);
    CHECK(a.report.sr().stddev == 0.0);
    CHECK(a.report.gcr().stddev == 0.0);
    CHECK(a.report.exec().stddev == 0.0);
    CHECK(a.report.csr().stddev == 0.0);

    config.jobs = 4;
    SuiteResult b = run_suite(config);
    CHECK(a.report.to_text() == b.report.to_text());
    CHECK(a.report.to_csv() == b.report.to_csv());
    REQUIRE(a.traces.size() == b.traces.size());
    for (size_t i = 0; i < a.traces.size(); ++i) {
        CHECK(a.traces[i].serialize() == b.traces[i].serialize());
    }
}

TEST_CASE("report emission follows the documented layouts") {
    SuiteResult result = run_suite(testutil::suite_config(3, 1));
    std::string text = result.report.to_text();
    CHECK(text.find("CSR") != std::string::npos);
    CHECK(text.find("GCR") != std::string::npos);
    CHECK(text.find("EXEC") != std::string::npos);
    CHECK(text.find("turn_off_light") != std::string::npos);

    std::string csv = result.report.to_csv();
    CHECK(csv.rfind("task,csr,gcr,exec,sr\n", 0) == 0);
    std::string ablation = result.report.to_csv(2);
    CHECK(ablation.rfind("k,task,csr,gcr,exec,sr\n", 0) == 0);
    CHECK(ablation.find("\n2,turn_off_light,") != std::string::npos);
}

TEST_CASE("per-episode metrics of the shipped regression set at K=3") {
    SuiteResult result = run_suite(testutil::suite_config(3, 1));
    REQUIRE(result.report.runs.size() == 1);
    for (const auto& task : result.report.runs[0].tasks) {
        CAPTURE(task.task_id);
        CHECK(task.sr == 1);
        CHECK(task.gcr == 1.0);
        CHECK(task.csr == 1);
        CHECK(task.exec > 0.7);
        CHECK(task.status == "Completed");
    }
}

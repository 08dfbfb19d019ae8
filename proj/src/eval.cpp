#include "taskloop/eval.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

namespace taskloop::eval {

namespace {

using nlohmann::json;

std::string format4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

std::string numbered(const std::vector<std::string>& steps) {
    std::ostringstream out;
    for (size_t i = 0; i < steps.size(); ++i) {
        out << (i + 1) << ". " << steps[i] << "\n";
    }
    return out.str();
}

}  // namespace

std::string to_string(Split s) {
    switch (s) {
        case Split::TRAIN: return "TRAIN";
        case Split::VALIDATION: return "VALIDATION";
        case Split::TEST: return "TEST";
    }
    return "?";
}

std::vector<TaskTuple> load_dataset(const std::string& path, const ActionCatalog& catalog) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open dataset: " + path);
    std::vector<TaskTuple> out;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::string where = path + ":" + std::to_string(line_number);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw SchemaError(where + ": invalid JSON: " + e.what());
        }
        TaskTuple t;
        t.id = j.value("id", "");
        if (t.id.empty()) throw SchemaError(where + ": missing id");
        t.description = j.value("description", "");
        if (t.description.empty()) throw SchemaError(where + ": missing description");
        for (const auto& s : j.value("plan", json::array())) t.plan_steps.push_back(s.get<std::string>());
        for (const auto& s : j.value("script", json::array())) t.script_lines.push_back(s.get<std::string>());
        std::string split = j.value("split", "");
        if (split == "TRAIN") t.split = Split::TRAIN;
        else if (split == "VALIDATION") t.split = Split::VALIDATION;
        else if (split == "TEST") t.split = Split::TEST;
        else throw SchemaError(where + ": unknown split \"" + split + "\"");
        for (const auto& r : j.value("relevant_objects", json::array())) {
            auto ref = parse_plain_ref(r.get<std::string>());
            if (!ref) throw SchemaError(where + ": malformed relevant object \"" + r.get<std::string>() + "\"");
            t.relevant_objects.push_back(*ref);
        }
        t.scene = j.value("scene", "");
        if (t.scene.empty()) throw SchemaError(where + ": missing scene");

        // The reference script must parse cleanly against the catalog.
        for (size_t i = 0; i < t.script_lines.size(); ++i) {
            TranslationResult r = parse_step(t.script_lines[i], catalog);
            if (const auto* err = std::get_if<ParseError>(&r)) {
                throw SchemaError(where + ": script line " + std::to_string(i + 1) + ": " + err->message);
            }
        }
        if (t.split == Split::TEST && t.relevant_objects.empty()) {
            throw SchemaError(where + ": TEST tuples require relevant_objects");
        }
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<TaskTuple> filter_split(const std::vector<TaskTuple>& tuples, Split split) {
    std::vector<TaskTuple> out;
    for (const auto& t : tuples) {
        if (t.split == split) out.push_back(t);
    }
    return out;
}

orchestrator::ExemplarSets exemplars_from_dataset(const std::vector<TaskTuple>& tuples,
                                                  size_t max_planning,
                                                  size_t max_body) {
    orchestrator::ExemplarSets sets;
    for (const auto& t : tuples) {
        if (t.split != Split::TRAIN) continue;
        if (sets.planning.size() < max_planning && !t.plan_steps.empty()) {
            sets.planning.push_back(prompts::Exemplar{t.description, numbered(t.plan_steps)});
        }
        size_t n = std::min(t.plan_steps.size(), t.script_lines.size());
        for (size_t i = 0; i < n && sets.body.size() < max_body; ++i) {
            sets.body.push_back(prompts::Exemplar{t.plan_steps[i], t.script_lines[i]});
        }
    }
    if (!sets.planning.empty()) {
        // One canned refinement example: a container error and the revised plan.
        sets.feedback.push_back(prompts::Exemplar{
            "cannot execute [GRAB] <milk> (1): <milk> (1) is inside <fridge> (1), which is CLOSED",
            "1. Walk to the fridge\n2. Open the fridge\n3. Grab the milk\n"});
    }
    return sets;
}

double exec_score(const orchestrator::EpisodeTrace& trace) {
    int ok = 0;
    int concrete = 0;
    for (const auto& a : trace.attempts) {
        if (a.kind == "ok") {
            ++ok;
            ++concrete;
        } else if (a.kind == "exec_error") {
            ++concrete;
        }
        // pass / parse_error / plan_parse_error carry no concrete command
    }
    if (concrete == 0) return 1.0;
    return static_cast<double>(ok) / concrete;
}

household::ConditionSet goal_conditions(const TaskTuple& tuple,
                                        const std::string& scene_path,
                                        const ActionCatalog& catalog) {
    auto env = household::HouseholdEnv::load_scene(scene_path, catalog);
    household::WorldState initial = env->state();
    for (size_t i = 0; i < tuple.script_lines.size(); ++i) {
        StepOutcome out = env->execute_command(tuple.script_lines[i]);
        if (!out.ok()) {
            throw DatasetError("reference script of task " + tuple.id + " fails at line " +
                               std::to_string(i + 1) + ": " + out.error_message);
        }
    }
    return household::state_diff(initial, env->state());
}

double gcr(const household::WorldState& final_state, const household::ConditionSet& tgc) {
    if (tgc.empty()) return 1.0;
    auto partition = household::check_conditions(final_state, tgc);
    return 1.0 - static_cast<double>(partition.unsatisfied.size()) / static_cast<double>(tgc.size());
}

std::pair<int, int> sr_and_csr(const household::WorldState& final_state,
                               const household::ConditionSet& tgc,
                               const std::vector<ObjectRef>& relevant_objects) {
    auto partition = household::check_conditions(final_state, tgc);
    int sr = partition.unsatisfied.empty() ? 1 : 0;

    if (relevant_objects.empty()) {
        throw MissingAnnotation("csr requires relevant_objects annotations");
    }
    auto is_relevant = [&](const household::Condition& c) {
        for (const auto& ref : relevant_objects) {
            if (c.subject == ref) return true;
            if (c.kind == household::Condition::Kind::Rel && c.object == ref) return true;
        }
        return false;
    };
    int csr = 1;
    for (const auto& c : partition.unsatisfied) {
        if (is_relevant(c)) {
            csr = 0;
            break;
        }
    }
    return {sr, csr};
}

double RunMetrics::mean_exec() const {
    double s = 0;
    for (const auto& t : tasks) s += t.exec;
    return tasks.empty() ? 0.0 : s / tasks.size();
}
double RunMetrics::mean_gcr() const {
    double s = 0;
    for (const auto& t : tasks) s += t.gcr;
    return tasks.empty() ? 0.0 : s / tasks.size();
}
double RunMetrics::mean_sr() const {
    double s = 0;
    for (const auto& t : tasks) s += t.sr;
    return tasks.empty() ? 0.0 : s / tasks.size();
}
double RunMetrics::mean_csr() const {
    double s = 0;
    for (const auto& t : tasks) s += t.csr;
    return tasks.empty() ? 0.0 : s / tasks.size();
}

namespace {

// Streaming sum/sum-of-squares accumulation; the test suite cross-checks
// this against an independent two-pass computation.
MeanStd accumulate(const std::vector<double>& values) {
    if (values.empty()) return {};
    // Shift by the first value so identical inputs cancel exactly and the
    // deviation comes out as a true zero.
    double shift = values.front();
    double sum = 0, sumsq = 0;
    for (double v : values) {
        sum += v - shift;
        sumsq += (v - shift) * (v - shift);
    }
    double shifted_mean = sum / values.size();
    double var = sumsq / values.size() - shifted_mean * shifted_mean;
    return {shift + shifted_mean, std::sqrt(std::max(0.0, var))};
}

MeanStd over_runs(const std::vector<RunMetrics>& runs, double (RunMetrics::*f)() const) {
    std::vector<double> values;
    for (const auto& r : runs) values.push_back((r.*f)());
    return accumulate(values);
}

}  // namespace

MeanStd mean_std_two_pass(const std::vector<double>& values) {
    if (values.empty()) return {};
    double mean = 0;
    for (double v : values) mean += v;
    mean /= values.size();
    double var = 0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= values.size();
    return {mean, std::sqrt(var)};
}

MeanStd MetricsReport::exec() const { return over_runs(runs, &RunMetrics::mean_exec); }
MeanStd MetricsReport::gcr() const { return over_runs(runs, &RunMetrics::mean_gcr); }
MeanStd MetricsReport::sr() const { return over_runs(runs, &RunMetrics::mean_sr); }
MeanStd MetricsReport::csr() const { return over_runs(runs, &RunMetrics::mean_csr); }

std::vector<TaskMetrics> MetricsReport::per_task_means() const {
    std::vector<TaskMetrics> out;
    if (runs.empty()) return out;
    size_t n = runs.front().tasks.size();
    for (size_t i = 0; i < n; ++i) {
        TaskMetrics m;
        m.task_id = runs.front().tasks[i].task_id;
        m.status = runs.front().tasks[i].status;
        double sr_sum = 0, csr_sum = 0;
        for (const auto& r : runs) {
            m.exec += r.tasks[i].exec;
            m.gcr += r.tasks[i].gcr;
            sr_sum += r.tasks[i].sr;
            csr_sum += r.tasks[i].csr;
        }
        m.exec /= runs.size();
        m.gcr /= runs.size();
        m.sr = sr_sum / runs.size() >= 1.0 ? 1 : 0;
        m.csr = csr_sum / runs.size() >= 1.0 ? 1 : 0;
        out.push_back(std::move(m));
    }
    return out;
}

std::string MetricsReport::to_text() const {
    std::ostringstream out;
    size_t width = 4;
    for (const auto& t : per_task_means()) width = std::max(width, t.task_id.size());
    out << "Task";
    out << std::string(width - 4, ' ');
    out << "  CSR     GCR     EXEC    SR\n";
    for (const auto& t : per_task_means()) {
        out << t.task_id << std::string(width - t.task_id.size(), ' ') << "  " << t.csr
            << "       " << format4(t.gcr) << "  " << format4(t.exec) << "  " << t.sr << "\n";
    }
    out << "\n";
    out << "runs=" << runs.size() << " k=" << k << " temperature=" << format4(temperature)
        << " backend=" << backend << "\n";
    auto line = [&](const char* name, MeanStd m) {
        out << name << " " << format4(m.mean) << " +/- " << format4(m.stddev) << "\n";
    };
    line("SR  ", sr());
    line("GCR ", gcr());
    line("EXEC", exec());
    line("CSR ", csr());
    return out.str();
}

std::string MetricsReport::to_csv(int k_column) const {
    std::ostringstream out;
    out << (k_column >= 0 ? "k,task,csr,gcr,exec,sr\n" : "task,csr,gcr,exec,sr\n");
    for (const auto& t : per_task_means()) {
        if (k_column >= 0) out << k_column << ",";
        out << t.task_id << "," << t.csr << "," << format4(t.gcr) << "," << format4(t.exec)
            << "," << t.sr << "\n";
    }
    return out.str();
}

SuiteResult run_suite(const SuiteConfig& config) {
    ActionCatalog catalog = ActionCatalog::load(config.catalog_path);
    std::vector<TaskTuple> tuples = load_dataset(config.dataset_path, catalog);
    std::vector<TaskTuple> test = filter_split(tuples, Split::TEST);
    orchestrator::ExemplarSets exemplars = exemplars_from_dataset(tuples);
    prompts::PromptSet prompt_set = config.prompts_dir.empty()
                                        ? prompts::PromptSet::builtin()
                                        : prompts::PromptSet::load(config.prompts_dir);

    // Goal conditions are a pure function of the tuple; compute once.
    std::vector<household::ConditionSet> tgc(test.size());
    for (size_t i = 0; i < test.size(); ++i) {
        tgc[i] = goal_conditions(test[i], config.scenes_dir + "/" + test[i].scene, catalog);
    }

    SuiteResult result;
    result.report.k = config.k;
    result.report.temperature = config.temperature;
    result.report.backend = config.http ? "http:" + config.http->model : "scripted";
    result.report.runs.resize(config.runs);
    result.traces.resize(test.size());

    struct Slot {
        TaskMetrics metrics;
        orchestrator::EpisodeTrace trace;
        bool backend_error = false;
    };
    std::vector<Slot> slots(static_cast<size_t>(config.runs) * test.size());

    auto run_one = [&](int run_index, size_t task_index) {
        const TaskTuple& tuple = test[task_index];
        Slot& slot = slots[static_cast<size_t>(run_index) * test.size() + task_index];

        auto env = household::HouseholdEnv::load_scene(config.scenes_dir + "/" + tuple.scene, catalog);
        std::unique_ptr<gateway::Session> brain;
        std::unique_ptr<gateway::Session> body;
        if (config.http) {
            brain = gateway::open_session(*config.http);
            body = gateway::open_session(*config.http);
        } else {
            brain = gateway::open_session(gateway::ScriptedConfig{
                config.transcripts_dir + "/" + tuple.id + ".brain.jsonl", config.strict_replay});
            body = gateway::open_session(gateway::ScriptedConfig{
                config.transcripts_dir + "/" + tuple.id + ".body.jsonl", config.strict_replay});
        }

        orchestrator::TaskSpec spec;
        spec.id = tuple.id;
        spec.description = tuple.description;
        spec.env_kind = orchestrator::TaskSpec::EnvKind::HOUSEHOLD;
        spec.scene = tuple.scene;
        spec.ground_truth = tuple.script_lines;
        spec.relevant_objects = tuple.relevant_objects;

        orchestrator::LoopConfig loop;
        loop.max_feedback_loops = config.k;
        loop.strict_replay = config.strict_replay;

        orchestrator::EpisodeTrace trace =
            orchestrator::run_episode(spec, *env, *brain, *body, loop, prompt_set, exemplars);

        TaskMetrics m;
        m.task_id = tuple.id;
        m.status = trace.status;
        m.exec = exec_score(trace);
        m.gcr = gcr(env->state(), tgc[task_index]);
        auto [sr, csr] = sr_and_csr(env->state(), tgc[task_index], tuple.relevant_objects);
        m.sr = sr;
        m.csr = csr;

        slot.backend_error = trace.status == "BackendError";
        slot.metrics = std::move(m);
        slot.trace = std::move(trace);

        if (run_index == 0 && !config.record_dir.empty()) {
            brain->record(config.record_dir + "/" + tuple.id + ".brain.jsonl");
            body->record(config.record_dir + "/" + tuple.id + ".body.jsonl");
        }
    };

    size_t total = slots.size();
    int jobs = std::max(1, config.jobs);
    if (jobs == 1) {
        for (size_t i = 0; i < total; ++i) {
            run_one(static_cast<int>(i / test.size()), i % test.size());
        }
    } else {
        std::vector<std::thread> workers;
        for (int w = 0; w < jobs; ++w) {
            workers.emplace_back([&, w] {
                for (size_t i = static_cast<size_t>(w); i < total; i += static_cast<size_t>(jobs)) {
                    run_one(static_cast<int>(i / test.size()), i % test.size());
                }
            });
        }
        for (auto& t : workers) t.join();
    }

    for (int r = 0; r < config.runs; ++r) {
        result.report.runs[r].run_index = r;
        for (size_t i = 0; i < test.size(); ++i) {
            Slot& slot = slots[static_cast<size_t>(r) * test.size() + i];
            result.report.runs[r].tasks.push_back(slot.metrics);
            if (slot.backend_error) ++result.backend_errors;
            if (r == 0) result.traces[i] = std::move(slot.trace);
        }
    }
    return result;
}

}  // namespace taskloop::eval

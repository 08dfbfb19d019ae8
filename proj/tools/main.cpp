// Operator entry point: run evaluation suites against scripted or live
// backends, sweep the feedback budget, and replay recorded episode traces.

#include "taskloop/eval.hpp"
#include "taskloop/orchestrator.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace taskloop;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBackendFailure = 1;
constexpr int kExitUsage = 2;

struct CommonOptions {
    std::string dataset;
    std::string scenes;
    std::string catalog;
    std::string transcripts;
    std::string prompts;
    std::string backend = "scripted";  // "scripted" or a JSON config path
    std::string mode = "replay";       // live | replay | record
    std::string out;
    int k = 3;
    int runs = 5;
    double temperature = 0.5;
    int jobs = 1;
    bool force = false;
    bool strict = false;
};

void add_common_flags(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--dataset", opt.dataset, "JSON Lines task dataset")->required();
    cmd->add_option("--scenes", opt.scenes, "directory with scene JSON files")->required();
    cmd->add_option("--catalog", opt.catalog, "action catalog JSON")->required();
    cmd->add_option("--transcripts", opt.transcripts,
                    "directory with <task>.brain.jsonl / <task>.body.jsonl transcripts");
    cmd->add_option("--prompts", opt.prompts, "prompt template directory (default: shipped)");
    cmd->add_option("--backend", opt.backend, "\"scripted\" or an HTTP backend config file");
    cmd->add_option("--mode", opt.mode, "live | replay | record")
        ->check(CLI::IsMember({"live", "replay", "record"}));
    cmd->add_option("--out", opt.out, "output directory")->required();
    cmd->add_option("--runs", opt.runs, "independent runs to average")->check(CLI::PositiveNumber);
    cmd->add_option("--temperature", opt.temperature, "sampling temperature")
        ->check(CLI::Range(0.0, 2.0));
    cmd->add_option("--jobs", opt.jobs, "parallel episodes")->check(CLI::PositiveNumber);
    cmd->add_flag("--force", opt.force, "allow writing into a non-empty output directory");
    cmd->add_flag("--strict", opt.strict, "strict replay: verify request texts match");
}

int prepare_out_dir(const CommonOptions& opt) {
    fs::path out(opt.out);
    if (fs::exists(out) && !fs::is_empty(out) && !opt.force) {
        std::cerr << "error: output directory " << opt.out
                  << " is not empty (use --force to overwrite)\n";
        return kExitUsage;
    }
    fs::create_directories(out);
    return kExitOk;
}

// Builds the suite configuration shared by run and ablate, or reports a
// usage error. Live/record modes need an HTTP backend; replay needs
// transcripts.
std::optional<eval::SuiteConfig> make_suite_config(const CommonOptions& opt, std::string& error) {
    eval::SuiteConfig config;
    config.dataset_path = opt.dataset;
    config.scenes_dir = opt.scenes;
    config.catalog_path = opt.catalog;
    config.transcripts_dir = opt.transcripts;
    config.prompts_dir = opt.prompts;
    config.k = opt.k;
    config.runs = opt.runs;
    config.temperature = opt.temperature;
    config.jobs = opt.jobs;
    config.strict_replay = opt.strict;
    if (opt.mode == "live" || opt.mode == "record") {
        if (opt.backend == "scripted") {
            error = opt.mode + " mode requires an HTTP backend config (--backend FILE)";
            return std::nullopt;
        }
        gateway::HttpConfig http = gateway::http_config_from_file(opt.backend);
        http.temperature = opt.temperature;
        config.http = http;
        if (opt.mode == "record") {
            config.record_dir = (fs::path(opt.out) / "transcripts").string();
        }
    } else {
        if (opt.transcripts.empty()) {
            error = "replay mode requires --transcripts";
            return std::nullopt;
        }
    }
    return config;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

int cmd_run(const CommonOptions& opt) {
    if (int rc = prepare_out_dir(opt); rc != kExitOk) return rc;
    std::string error;
    auto config = make_suite_config(opt, error);
    if (!config) {
        std::cerr << "error: " << error << "\n";
        return kExitUsage;
    }
    if (!config->record_dir.empty()) fs::create_directories(config->record_dir);

    eval::SuiteResult result = eval::run_suite(*config);

    fs::path out(opt.out);
    write_file(out / "report.txt", result.report.to_text());
    write_file(out / "report.csv", result.report.to_csv());
    fs::create_directories(out / "traces");
    for (const auto& trace : result.traces) {
        write_file(out / "traces" / (trace.task_id + ".json"), trace.serialize());
    }
    std::cout << result.report.to_text();
    if (result.backend_errors > 0) {
        std::cerr << result.backend_errors << " episode(s) failed with backend errors\n";
        return kExitBackendFailure;
    }
    return kExitOk;
}

int cmd_ablate(const CommonOptions& opt, const std::vector<int>& k_values) {
    if (k_values.size() < 2) {
        std::cerr << "error: ablation needs at least two K values\n";
        return kExitUsage;
    }
    if (int rc = prepare_out_dir(opt); rc != kExitOk) return rc;
    std::string error;
    auto base = make_suite_config(opt, error);
    if (!base) {
        std::cerr << "error: " << error << "\n";
        return kExitUsage;
    }

    std::ostringstream csv;
    csv << "k,task,csr,gcr,exec,sr\n";
    std::vector<double> sr_means, gcr_means, exec_means;
    int backend_errors = 0;
    for (int k : k_values) {
        eval::SuiteConfig config = *base;
        config.k = k;
        eval::SuiteResult result = eval::run_suite(config);
        backend_errors += result.backend_errors;
        std::string rows = result.report.to_csv(k);
        // Drop the per-sweep header line; one combined header suffices.
        csv << rows.substr(rows.find('\n') + 1);
        sr_means.push_back(result.report.sr().mean);
        gcr_means.push_back(result.report.gcr().mean);
        exec_means.push_back(result.report.exec().mean);
    }

    auto non_decreasing = [](const std::vector<double>& v) {
        for (size_t i = 1; i < v.size(); ++i) {
            if (v[i] < v[i - 1] - 1e-12) return false;
        }
        return true;
    };
    std::ostringstream summary;
    summary << "monotonic non-decreasing over K:"
            << " SR=" << (non_decreasing(sr_means) ? "yes" : "no")
            << " GCR=" << (non_decreasing(gcr_means) ? "yes" : "no")
            << " EXEC=" << (non_decreasing(exec_means) ? "yes" : "no") << "\n";

    fs::path out(opt.out);
    write_file(out / "ablation.csv", csv.str());
    write_file(out / "ablation_summary.txt", summary.str());
    std::cout << summary.str();
    return backend_errors > 0 ? kExitBackendFailure : kExitOk;
}

int cmd_replay_trace(const std::string& trace_path) {
    std::ifstream in(trace_path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot open " << trace_path << "\n";
        return kExitUsage;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
        std::cerr << "error: invalid trace at byte " << e.byte << ": " << e.what() << "\n";
        return kExitUsage;
    }
    orchestrator::EpisodeTrace trace = orchestrator::EpisodeTrace::from_json(j);

    std::cout << "Episode " << trace.task_id << " — " << trace.status << "\n";
    if (trace.status == "OscillationDetected") {
        std::cout << "  plan revision " << trace.plans.back().revision
                  << " repeats revision " << trace.oscillation_with << "\n";
    }
    for (const auto& plan : trace.plans) {
        std::cout << "\nPlan revision " << plan.revision << ":\n";
        for (const auto& step : plan.steps) {
            std::cout << "  " << step.index << ". " << step.text;
            if (!step.rationale.empty()) std::cout << "  // " << step.rationale;
            std::cout << "\n";
        }
        for (const auto& a : trace.attempts) {
            if (a.revision != plan.revision) continue;
            if (a.kind == "plan_parse_error") {
                std::cout << "  ! plan rejected: " << a.error_message << "\n";
            } else if (a.kind == "pass") {
                std::cout << "  - step " << a.step_index << " -> [Pass] (skipped)\n";
            } else if (a.kind == "ok") {
                std::cout << "  - step " << a.step_index << " -> " << a.command << " : ok\n";
            } else {
                std::cout << "  - step " << a.step_index << " -> " << a.command << " : "
                          << a.error_code << " (" << a.error_message << ")\n";
            }
        }
    }
    std::cout << "\nFinal state:\n" << trace.final_state;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Closed-loop task planning evaluation harness"};
    app.require_subcommand(1);

    CommonOptions run_opt;
    CLI::App* run = app.add_subcommand("run", "run the evaluation suite and write reports");
    add_common_flags(run, run_opt);
    run->add_option("--k", run_opt.k, "feedback-loop budget")->check(CLI::NonNegativeNumber);

    CommonOptions ablate_opt;
    std::vector<int> k_values;
    CLI::App* ablate = app.add_subcommand("ablate", "sweep the feedback budget K");
    add_common_flags(ablate, ablate_opt);
    ablate->add_option("--k", k_values, "K values to sweep (at least two)")
        ->check(CLI::NonNegativeNumber);

    std::string trace_path;
    CLI::App* replay = app.add_subcommand("replay-trace", "pretty-print a recorded episode trace");
    replay->add_option("trace", trace_path, "episode trace JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (run->parsed()) return cmd_run(run_opt);
        if (ablate->parsed()) return cmd_ablate(ablate_opt, k_values);
        if (replay->parsed()) return cmd_replay_trace(trace_path);
    } catch (const gateway::GatewayError& e) {
        std::cerr << "backend error: " << e.what() << "\n";
        return kExitBackendFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

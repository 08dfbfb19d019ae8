#pragma once

#include "taskloop/gateway.hpp"
#include "taskloop/grammar.hpp"
#include "taskloop/household.hpp"
#include "taskloop/orchestrator.hpp"

#include <optional>
#include <string>
#include <vector>

namespace taskloop::eval {

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DatasetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MissingAnnotation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Split { TRAIN, VALIDATION, TEST };
std::string to_string(Split s);

struct TaskTuple {
    std::string id;
    std::string description;
    std::vector<std::string> plan_steps;    // reference natural-language plan
    std::vector<std::string> script_lines;  // reference command script
    Split split = Split::TRAIN;
    std::vector<ObjectRef> relevant_objects;
    std::string scene;  // scene file, relative to the scenes directory
};

/// Load a JSON Lines dataset; every reference script must parse cleanly
/// against the catalog and TEST tuples must carry relevant objects.
std::vector<TaskTuple> load_dataset(const std::string& path, const ActionCatalog& catalog);

std::vector<TaskTuple> filter_split(const std::vector<TaskTuple>& tuples, Split split);

/// In-context exemplars drawn from the TRAIN split.
orchestrator::ExemplarSets exemplars_from_dataset(const std::vector<TaskTuple>& tuples,
                                                  size_t max_planning = 3,
                                                  size_t max_body = 12);

/// Fraction of concrete commands (across all plan revisions) that executed
/// without error. Pass tokens and parse failures carry no concrete command
/// and are excluded; an empty denominator scores 1.0.
double exec_score(const orchestrator::EpisodeTrace& trace);

/// Total goal conditions: the initial-to-final state diff of the reference
/// script executed on a fresh copy of the scene. A script that fails to
/// execute is a dataset defect (DatasetError).
household::ConditionSet goal_conditions(const TaskTuple& tuple,
                                        const std::string& scene_path,
                                        const ActionCatalog& catalog);

/// GCR = 1 - UGC/TGC; an empty TGC scores 1.0.
double gcr(const household::WorldState& final_state, const household::ConditionSet& tgc);

/// sr = 1 iff no unsatisfied goal condition; csr relaxes sr to conditions
/// whose subject or object is an annotated relevant object.
std::pair<int, int> sr_and_csr(const household::WorldState& final_state,
                               const household::ConditionSet& tgc,
                               const std::vector<ObjectRef>& relevant_objects);

struct TaskMetrics {
    std::string task_id;
    double exec = 0.0;
    double gcr = 0.0;
    int sr = 0;
    int csr = 0;
    std::string status;
};

struct RunMetrics {
    int run_index = 0;
    std::vector<TaskMetrics> tasks;

    double mean_exec() const;
    double mean_gcr() const;
    double mean_sr() const;
    double mean_csr() const;
};

struct MeanStd {
    double mean = 0.0;
    double stddev = 0.0;
};

struct MetricsReport {
    std::vector<RunMetrics> runs;
    int k = 3;
    double temperature = 0.5;
    std::string backend = "scripted";

    /// Per-metric mean and population stddev over the per-run means.
    MeanStd exec() const;
    MeanStd gcr() const;
    MeanStd sr() const;
    MeanStd csr() const;

    /// Per-task metrics averaged over runs, in task order.
    std::vector<TaskMetrics> per_task_means() const;

    /// Aligned text table, columns task/CSR/GCR/EXEC/SR plus summary lines.
    std::string to_text() const;
    /// CSV with columns task,csr,gcr,exec,sr. A non-negative k_column adds a
    /// leading k column (ablation output).
    std::string to_csv(int k_column = -1) const;
};

struct SuiteConfig {
    std::string dataset_path;
    std::string scenes_dir;
    std::string catalog_path;
    std::string transcripts_dir;  // scripted mode: <task>.brain.jsonl / <task>.body.jsonl
    std::string prompts_dir;      // empty: shipped templates
    int k = 3;
    int runs = 5;
    double temperature = 0.5;
    int jobs = 1;
    bool strict_replay = false;
    std::optional<gateway::HttpConfig> http;  // live backend when set
    std::string record_dir;  // non-empty: record run-0 session transcripts here
};

struct SuiteResult {
    MetricsReport report;
    /// Traces of the first run, in task order.
    std::vector<orchestrator::EpisodeTrace> traces;
    int backend_errors = 0;
};

SuiteResult run_suite(const SuiteConfig& config);

/// Independent mean/std accumulation (two-pass) used to cross-check the
/// report aggregation.
MeanStd mean_std_two_pass(const std::vector<double>& values);

}  // namespace taskloop::eval

#pragma once

#include "taskloop/environment.hpp"
#include "taskloop/gateway.hpp"
#include "taskloop/grammar.hpp"
#include "taskloop/prompts.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <variant>
#include <vector>

namespace taskloop::orchestrator {

struct PlanStep {
    int index = 0;  // 1-based, contiguous
    std::string text;
    std::string rationale;  // text after "//", may be empty
};

struct Plan {
    std::vector<PlanStep> steps;
    int revision = 0;
};

struct PlanParseError {
    std::string message;
};

using PlanParse = std::variant<Plan, PlanParseError>;

/// Parse a numbered-step completion. Tolerates "1.", "1)" and "Step 1:"
/// prefixes; text after "//" goes into the rationale. Lines that match no
/// step form are skipped; zero recognized steps is a PlanParseError.
PlanParse parse_plan(const std::string& completion);

/// Numbered text form used inside feedback prompts.
std::string render_plan(const Plan& plan);

/// Comparison key for the oscillation guard: step texts lowercased,
/// punctuation stripped, rationales dropped.
std::string normalize_plan(const Plan& plan);

struct LoopConfig {
    int max_feedback_loops = 3;  // K
    bool oscillation_guard = true;
    bool strict_replay = false;
};

struct TaskSpec {
    enum class EnvKind { HOUSEHOLD, TABLETOP };

    std::string id;
    std::string description;
    EnvKind env_kind = EnvKind::HOUSEHOLD;
    std::string scene;                        // scene/spec file reference
    std::vector<std::string> ground_truth;    // reference command script (household)
    std::vector<ObjectRef> relevant_objects;  // CSR annotation
    bool has_goal = false;                    // tabletop: goal lives in the spec file
};

/// Error signal routed back to the planner.
struct Feedback {
    Perception perception;
    std::string failed_step;  // rendered command text, or the raw reply
    std::string error_text;
    bool format_reminder = false;  // unparseable plan: re-ask instead
};

struct Attempt {
    int revision = 0;
    int step_index = 0;     // 0 for plan-level events
    std::string step_text;
    std::string command;    // raw translator output; empty for plan-level events
    std::string kind;       // ok | exec_error | parse_error | pass | plan_parse_error
    std::string error_code;
    std::string error_message;
};

struct EpisodeTrace {
    std::string task_id;
    std::string status;  // Completed | FeedbackBudgetExhausted | OscillationDetected | BackendError
    std::vector<Plan> plans;
    std::vector<Attempt> attempts;
    std::string final_state;
    int oscillation_with = -1;  // revision the oscillating plan repeated

    nlohmann::ordered_json to_json() const;
    static EpisodeTrace from_json(const nlohmann::json& j);

    /// Byte-stable serialization used for replay-identity checks.
    std::string serialize() const;
};

struct ExemplarSets {
    std::vector<prompts::Exemplar> planning;  // task description -> plan text
    std::vector<prompts::Exemplar> feedback;  // error text -> revised plan
    std::vector<prompts::Exemplar> body;      // step text -> command text
};

/// SYSTEM master prompt + USER message holding exemplars, the task, and the
/// perception summary. Requires at least one exemplar.
gateway::PromptMessages build_planning_prompt(const TaskSpec& task,
                                              const Perception& perception,
                                              const std::vector<prompts::Exemplar>& exemplars,
                                              const prompts::PromptSet& set);

/// Prompt embedding the prior plan, the failed command, the error message
/// and the current state; instructs a full revised plan.
gateway::PromptMessages build_feedback_prompt(const TaskSpec& task,
                                              const Plan& prior_plan,
                                              const Feedback& feedback,
                                              const std::vector<prompts::Exemplar>& exemplars,
                                              const prompts::PromptSet& set);

gateway::PromptMessages build_translation_prompt(const PlanStep& step,
                                                 const std::vector<prompts::Exemplar>& exemplars,
                                                 const prompts::PromptSet& set);

/// The planner/translator loop: plan, translate step by step, execute, and
/// route failures into at most `max_feedback_loops` full replans against the
/// persisted environment state. Pass steps are skipped without execution.
EpisodeTrace run_episode(const TaskSpec& task,
                         Environment& env,
                         gateway::Session& brain,
                         gateway::Session& body,
                         const LoopConfig& config,
                         const prompts::PromptSet& set,
                         const ExemplarSets& exemplars);

}  // namespace taskloop::orchestrator

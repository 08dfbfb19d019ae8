#include "taskloop/orchestrator.hpp"

#include <cctype>
#include <optional>
#include <sstream>

namespace taskloop::orchestrator {

namespace {

using gateway::Message;
using gateway::PromptMessages;
using prompts::Exemplar;

std::string trim(const std::string& s) {
    auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

// "1. text", "1) text", "Step 1: text"; returns the step body or nullopt.
std::optional<std::string> match_step_line(const std::string& line) {
    size_t i = 0;
    auto skip_ws = [&] {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    };
    skip_ws();
    // Optional "Step" prefix.
    static const std::string kStep = "step";
    if (i + 4 <= line.size()) {
        std::string word = line.substr(i, 4);
        for (char& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (word == kStep) {
            size_t j = i + 4;
            if (j < line.size() && (line[j] == ' ' || line[j] == '\t')) i = j;
        }
    }
    skip_ws();
    size_t digits_start = i;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i == digits_start) return std::nullopt;
    if (i >= line.size()) return std::nullopt;
    char sep = line[i];
    if (sep != '.' && sep != ')' && sep != ':') return std::nullopt;
    ++i;
    return trim(line.substr(i));
}

}  // namespace

PlanParse parse_plan(const std::string& completion) {
    Plan plan;
    std::istringstream iss(completion);
    std::string line;
    while (std::getline(iss, line)) {
        auto body = match_step_line(line);
        if (!body || body->empty()) continue;
        PlanStep step;
        auto slash = body->find("//");
        if (slash != std::string::npos) {
            step.rationale = trim(body->substr(slash + 2));
            step.text = trim(body->substr(0, slash));
        } else {
            step.text = *body;
        }
        if (step.text.empty()) continue;
        step.index = static_cast<int>(plan.steps.size()) + 1;
        plan.steps.push_back(std::move(step));
    }
    if (plan.steps.empty()) {
        return PlanParseError{"completion contains no recognizable numbered steps"};
    }
    return plan;
}

std::string render_plan(const Plan& plan) {
    std::ostringstream out;
    for (const auto& step : plan.steps) {
        out << step.index << ". " << step.text;
        if (!step.rationale.empty()) out << " // " << step.rationale;
        out << "\n";
    }
    return out.str();
}

std::string normalize_plan(const Plan& plan) {
    std::string out;
    for (const auto& step : plan.steps) {
        bool in_ws = false;
        for (char c : step.text) {
            if (std::isalnum(static_cast<unsigned char>(c))) {
                if (in_ws && !out.empty()) out.push_back(' ');
                in_ws = false;
                out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
            } else {
                in_ws = true;
            }
        }
        out.push_back('\n');
    }
    return out;
}

PromptMessages build_planning_prompt(const TaskSpec& task,
                                     const Perception& perception,
                                     const std::vector<Exemplar>& exemplars,
                                     const prompts::PromptSet& set) {
    if (exemplars.empty()) {
        throw std::invalid_argument("planning prompt requires at least one exemplar");
    }
    std::string user = set.planning_user.render({
        {"exemplars", prompts::format_exemplars(exemplars, "Task", "Plan")},
        {"task", task.description},
        {"state", perception.state_summary},
    });
    return {Message{Message::Role::SYSTEM, set.master.render({})},
            Message{Message::Role::USER, std::move(user)}};
}

PromptMessages build_feedback_prompt(const TaskSpec& task,
                                     const Plan& prior_plan,
                                     const Feedback& feedback,
                                     const std::vector<Exemplar>& exemplars,
                                     const prompts::PromptSet& set) {
    std::string user;
    if (feedback.format_reminder) {
        user = set.format_reminder.render({
            {"task", task.description},
            {"error", feedback.error_text},
            {"state", feedback.perception.state_summary},
        });
    } else {
        user = set.feedback_user.render({
            {"exemplars", prompts::format_exemplars(exemplars, "Error", "Revised plan")},
            {"task", task.description},
            {"prior_plan", render_plan(prior_plan)},
            {"failed_step", feedback.failed_step},
            {"error", feedback.error_text},
            {"state", feedback.perception.state_summary},
        });
    }
    return {Message{Message::Role::SYSTEM, set.master.render({})},
            Message{Message::Role::USER, std::move(user)}};
}

PromptMessages build_translation_prompt(const PlanStep& step,
                                        const std::vector<Exemplar>& exemplars,
                                        const prompts::PromptSet& set) {
    std::string user = set.body_user.render({
        {"exemplars", prompts::format_exemplars(exemplars, "Step", "Command")},
        {"step", step.text},
    });
    return {Message{Message::Role::SYSTEM, set.body_system.render({})},
            Message{Message::Role::USER, std::move(user)}};
}

nlohmann::ordered_json EpisodeTrace::to_json() const {
    nlohmann::ordered_json j;
    j["task_id"] = task_id;
    j["status"] = status;
    j["oscillation_with"] = oscillation_with;
    j["plans"] = nlohmann::ordered_json::array();
    for (const auto& plan : plans) {
        nlohmann::ordered_json p;
        p["revision"] = plan.revision;
        p["steps"] = nlohmann::ordered_json::array();
        for (const auto& step : plan.steps) {
            p["steps"].push_back({{"index", step.index},
                                  {"text", step.text},
                                  {"rationale", step.rationale}});
        }
        j["plans"].push_back(std::move(p));
    }
    j["attempts"] = nlohmann::ordered_json::array();
    for (const auto& a : attempts) {
        j["attempts"].push_back({{"revision", a.revision},
                                 {"step_index", a.step_index},
                                 {"step_text", a.step_text},
                                 {"command", a.command},
                                 {"kind", a.kind},
                                 {"error_code", a.error_code},
                                 {"error_message", a.error_message}});
    }
    j["final_state"] = final_state;
    return j;
}

EpisodeTrace EpisodeTrace::from_json(const nlohmann::json& j) {
    EpisodeTrace t;
    t.task_id = j.value("task_id", "");
    t.status = j.value("status", "");
    t.oscillation_with = j.value("oscillation_with", -1);
    for (const auto& p : j.value("plans", nlohmann::json::array())) {
        Plan plan;
        plan.revision = p.value("revision", 0);
        for (const auto& s : p.value("steps", nlohmann::json::array())) {
            plan.steps.push_back(PlanStep{s.value("index", 0), s.value("text", ""),
                                          s.value("rationale", "")});
        }
        t.plans.push_back(std::move(plan));
    }
    for (const auto& a : j.value("attempts", nlohmann::json::array())) {
        t.attempts.push_back(Attempt{a.value("revision", 0), a.value("step_index", 0),
                                     a.value("step_text", ""), a.value("command", ""),
                                     a.value("kind", ""), a.value("error_code", ""),
                                     a.value("error_message", "")});
    }
    t.final_state = j.value("final_state", "");
    return t;
}

std::string EpisodeTrace::serialize() const { return to_json().dump(2) + "\n"; }

EpisodeTrace run_episode(const TaskSpec& task,
                         Environment& env,
                         gateway::Session& brain,
                         gateway::Session& body,
                         const LoopConfig& config,
                         const prompts::PromptSet& set,
                         const ExemplarSets& exemplars) {
    EpisodeTrace trace;
    trace.task_id = task.id;

    Perception perception = env.perceive();
    PromptMessages prompt = build_planning_prompt(task, perception, exemplars.planning, set);
    int loops_used = 0;

    while (true) {
        std::string completion;
        try {
            completion = brain.complete(prompt);
        } catch (const gateway::GatewayError&) {
            trace.status = "BackendError";
            break;
        }

        PlanParse parsed = parse_plan(completion);
        if (const auto* err = std::get_if<PlanParseError>(&parsed)) {
            Attempt a;
            a.revision = static_cast<int>(trace.plans.size());
            a.kind = "plan_parse_error";
            a.error_code = "PlanParseError";
            a.error_message = err->message;
            trace.attempts.push_back(std::move(a));
            if (loops_used >= config.max_feedback_loops) {
                trace.status = "FeedbackBudgetExhausted";
                break;
            }
            ++loops_used;
            Feedback fb;
            fb.perception = env.perceive();
            fb.error_text = err->message;
            fb.format_reminder = true;
            prompt = build_feedback_prompt(task, Plan{}, fb, exemplars.feedback, set);
            continue;
        }

        Plan plan = std::get<Plan>(parsed);
        plan.revision = static_cast<int>(trace.plans.size());
        if (config.oscillation_guard) {
            std::string key = normalize_plan(plan);
            for (const auto& prior : trace.plans) {
                if (normalize_plan(prior) == key) {
                    trace.oscillation_with = prior.revision;
                    break;
                }
            }
        }
        trace.plans.push_back(plan);
        if (trace.oscillation_with >= 0) {
            trace.status = "OscillationDetected";
            break;
        }

        bool failed = false;
        bool backend_error = false;
        Feedback fb;
        for (const auto& step : plan.steps) {
            std::string reply;
            try {
                reply = body.complete(build_translation_prompt(step, exemplars.body, set));
            } catch (const gateway::GatewayError&) {
                backend_error = true;
                break;
            }
            reply = trim(reply);

            Attempt a;
            a.revision = plan.revision;
            a.step_index = step.index;
            a.step_text = step.text;
            a.command = reply;

            // Pass steps never execute and never consume feedback budget.
            if (is_pass_token(reply)) {
                a.kind = "pass";
                trace.attempts.push_back(std::move(a));
                continue;
            }

            StepOutcome outcome = env.execute_command(reply);
            a.kind = outcome.ok() ? "ok"
                     : outcome.kind == StepOutcome::Kind::ParseFailed ? "parse_error"
                                                                      : "exec_error";
            a.error_code = outcome.error_code;
            a.error_message = outcome.error_message;
            trace.attempts.push_back(std::move(a));

            if (!outcome.ok()) {
                failed = true;
                fb.perception = env.perceive();
                fb.failed_step = reply;
                fb.error_text = outcome.error_message;
                break;
            }
        }

        if (backend_error) {
            trace.status = "BackendError";
            break;
        }
        if (!failed) {
            trace.status = "Completed";
            break;
        }
        if (loops_used >= config.max_feedback_loops) {
            trace.status = "FeedbackBudgetExhausted";
            break;
        }
        ++loops_used;
        prompt = build_feedback_prompt(task, trace.plans.back(), fb, exemplars.feedback, set);
    }

    trace.final_state = env.serialize_state();
    return trace;
}

}  // namespace taskloop::orchestrator

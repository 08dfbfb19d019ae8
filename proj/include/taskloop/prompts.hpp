#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace taskloop::prompts {

struct TemplateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Plain-text template with {name} placeholders. Unknown placeholders throw;
/// literal braces are written as {{ and }}.
class PromptTemplate {
public:
    PromptTemplate() = default;
    explicit PromptTemplate(std::string text) : text_(std::move(text)) {}

    static PromptTemplate from_file(const std::string& path);

    std::string render(const std::map<std::string, std::string>& values) const;
    const std::string& text() const { return text_; }

private:
    std::string text_;
};

/// One in-context example: an input paired with the expected output.
struct Exemplar {
    std::string input;
    std::string output;
};

/// Deterministic block of "### Example" sections used inside prompts.
std::string format_exemplars(const std::vector<Exemplar>& exemplars,
                             const std::string& input_label,
                             const std::string& output_label);

/// The versioned prompt texts driving the planner and translator.
struct PromptSet {
    PromptTemplate master;          // SYSTEM prompt for the planner
    PromptTemplate planning_user;   // {exemplars} {task} {state}
    PromptTemplate feedback_user;   // {task} {prior_plan} {failed_step} {error} {state}
    PromptTemplate format_reminder; // re-ask after an unparseable plan
    PromptTemplate body_system;     // SYSTEM prompt for the translator
    PromptTemplate body_user;       // {exemplars} {step}

    /// Load from a directory of .txt files (master.txt, planning_user.txt,
    /// feedback_user.txt, format_reminder.txt, body_system.txt,
    /// body_user.txt).
    static PromptSet load(const std::string& dir);

    /// The shipped templates from the repository data directory.
    static PromptSet builtin();
};

}  // namespace taskloop::prompts

#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace taskloop {

/// Reference to a scene object, rendered as `<name> (id)`.
struct ObjectRef {
    std::string name;
    int instance_id = 0;

    auto operator<=>(const ObjectRef&) const = default;

    std::string render() const;
};

/// One executable primitive, e.g. `[GRAB] <milk> (1)`.
struct ActionStep {
    std::string verb;              // uppercase, must exist in the catalog
    std::vector<ObjectRef> args;   // length equals catalog arity

    bool operator==(const ActionStep&) const = default;
};

/// The `[Pass]` token: step has no executable counterpart, skip it.
struct PassToken {
    bool operator==(const PassToken&) const = default;
};

struct ParseError {
    enum class Reason { UnknownVerb, ArityMismatch, Malformed };
    Reason reason = Reason::Malformed;
    std::string message;

    bool operator==(const ParseError&) const = default;
};

using TranslationResult = std::variant<ActionStep, PassToken, ParseError>;

/// Verb entry: arity plus the precondition/effect templates interpreted by
/// the environment. Templates reference argument slots as "1" and "2".
struct CatalogEntry {
    int arity = 0;
    std::vector<std::string> preconditions;
    std::vector<std::string> effects;
};

class ActionCatalog {
public:
    ActionCatalog() = default;

    /// Load from a JSON config file; throws CatalogError on bad content.
    static ActionCatalog load(const std::string& path);
    static ActionCatalog from_json_text(const std::string& text);

    void add(const std::string& verb, CatalogEntry entry);

    const CatalogEntry* find(const std::string& verb_upper) const;
    bool contains(const std::string& verb_upper) const;

    const std::map<std::string, CatalogEntry>& entries() const { return entries_; }

private:
    std::map<std::string, CatalogEntry> entries_;
};

struct CatalogError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parse one command line. Total: any string yields a step, a pass token,
/// or a ParseError. Verbs match case-insensitively; object names are
/// case-sensitive lowercase identifiers.
TranslationResult parse_step(const std::string& text, const ActionCatalog& catalog);

/// True iff the text is the bare `[Pass]` token (word case-insensitive).
bool is_pass_token(const std::string& text);

/// Parse the plain `name (id)` form used in data files.
std::optional<ObjectRef> parse_plain_ref(const std::string& text);

/// Canonical single-line rendering; parse_step(render_step(s)) == s.
std::string render_step(const ActionStep& step);
std::string render_step(const PassToken&);
std::string render_step(const TranslationResult& result);

struct ScriptLine {
    int line_number = 0;   // 1-based, counting all input lines
    TranslationResult result;
};

/// Parse a multiline command script; blank lines are skipped, line numbers
/// preserved for error reporting.
std::vector<ScriptLine> parse_script(const std::string& text, const ActionCatalog& catalog);

/// Collect the errors of a parsed script as "line N: message" strings.
std::vector<std::string> script_errors(const std::vector<ScriptLine>& lines);

}  // namespace taskloop

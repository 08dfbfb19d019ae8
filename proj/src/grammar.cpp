#include "taskloop/grammar.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <fstream>
#include <sstream>

namespace taskloop {

namespace {

std::string to_upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

bool is_name_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

struct Cursor {
    const std::string& text;
    size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= text.size();
    }
    bool eat(char c) {
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
};

// `[WORD]` with the brackets; returns the raw word.
std::optional<std::string> read_bracketed_word(Cursor& cur) {
    cur.skip_ws();
    if (!cur.eat('[')) return std::nullopt;
    std::string word;
    while (cur.pos < cur.text.size() && cur.text[cur.pos] != ']') {
        word.push_back(cur.text[cur.pos++]);
    }
    if (!cur.eat(']')) return std::nullopt;
    if (word.empty()) return std::nullopt;
    for (char c : word) {
        if (!std::isalpha(static_cast<unsigned char>(c))) return std::nullopt;
    }
    return word;
}

// `<name> (id)`
std::optional<ObjectRef> read_object_ref(Cursor& cur) {
    cur.skip_ws();
    if (!cur.eat('<')) return std::nullopt;
    std::string name;
    while (cur.pos < cur.text.size() && cur.text[cur.pos] != '>') {
        name.push_back(cur.text[cur.pos++]);
    }
    if (!cur.eat('>') || name.empty()) return std::nullopt;
    for (char c : name) {
        if (!is_name_char(c)) return std::nullopt;
    }
    cur.skip_ws();
    if (!cur.eat('(')) return std::nullopt;
    cur.skip_ws();
    std::string digits;
    while (cur.pos < cur.text.size() && std::isdigit(static_cast<unsigned char>(cur.text[cur.pos]))) {
        digits.push_back(cur.text[cur.pos++]);
    }
    cur.skip_ws();
    if (!cur.eat(')') || digits.empty()) return std::nullopt;
    return ObjectRef{name, std::stoi(digits)};
}

}  // namespace

std::string ObjectRef::render() const {
    return "<" + name + "> (" + std::to_string(instance_id) + ")";
}

ActionCatalog ActionCatalog::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CatalogError("cannot open catalog file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

ActionCatalog ActionCatalog::from_json_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw CatalogError(std::string("catalog is not valid JSON: ") + e.what());
    }
    if (!doc.contains("verbs") || !doc["verbs"].is_object()) {
        throw CatalogError("catalog missing \"verbs\" object");
    }
    ActionCatalog catalog;
    for (const auto& [verb, entry] : doc["verbs"].items()) {
        CatalogEntry ce;
        ce.arity = entry.at("arity").get<int>();
        if (ce.arity < 0 || ce.arity > 2) {
            throw CatalogError("verb " + verb + ": arity must be 0, 1, or 2");
        }
        for (const auto& p : entry.value("preconditions", nlohmann::json::array())) {
            ce.preconditions.push_back(p.get<std::string>());
        }
        for (const auto& e : entry.value("effects", nlohmann::json::array())) {
            ce.effects.push_back(e.get<std::string>());
        }
        catalog.add(to_upper(verb), std::move(ce));
    }
    return catalog;
}

void ActionCatalog::add(const std::string& verb, CatalogEntry entry) {
    std::string upper = to_upper(verb);
    if (entries_.count(upper)) throw CatalogError("duplicate verb: " + upper);
    // Templates may reference only declared argument slots.
    auto check_slots = [&](const std::vector<std::string>& templates) {
        for (const auto& t : templates) {
            std::istringstream iss(t);
            std::string tok;
            while (iss >> tok) {
                if (tok == "1" && entry.arity < 1) {
                    throw CatalogError("verb " + upper + ": template references slot 1 but arity is 0");
                }
                if (tok == "2" && entry.arity < 2) {
                    throw CatalogError("verb " + upper + ": template references slot 2 but arity is " +
                                       std::to_string(entry.arity));
                }
            }
        }
    };
    check_slots(entry.preconditions);
    check_slots(entry.effects);
    entries_.emplace(upper, std::move(entry));
}

const CatalogEntry* ActionCatalog::find(const std::string& verb_upper) const {
    auto it = entries_.find(verb_upper);
    return it == entries_.end() ? nullptr : &it->second;
}

bool ActionCatalog::contains(const std::string& verb_upper) const {
    return entries_.count(verb_upper) != 0;
}

std::optional<ObjectRef> parse_plain_ref(const std::string& text) {
    auto open = text.find('(');
    auto close = text.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open) {
        return std::nullopt;
    }
    std::string name = text.substr(0, open);
    while (!name.empty() && (name.back() == ' ' || name.back() == '\t')) name.pop_back();
    std::string digits = text.substr(open + 1, close - open - 1);
    if (name.empty() || digits.empty()) return std::nullopt;
    for (char c : name) {
        if (!is_name_char(c)) return std::nullopt;
    }
    for (char c : digits) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    }
    return ObjectRef{name, std::stoi(digits)};
}

bool is_pass_token(const std::string& text) {
    Cursor cur{text};
    auto word = read_bracketed_word(cur);
    if (!word || !cur.done()) return false;
    return to_upper(*word) == "PASS";
}

TranslationResult parse_step(const std::string& text, const ActionCatalog& catalog) {
    Cursor cur{text};
    auto word = read_bracketed_word(cur);
    if (!word) {
        return ParseError{ParseError::Reason::Malformed,
                          "expected [VERB] at start of command: " + text};
    }
    std::string verb = to_upper(*word);
    if (verb == "PASS") {
        if (!cur.done()) {
            return ParseError{ParseError::Reason::Malformed, "[Pass] takes no arguments: " + text};
        }
        return PassToken{};
    }
    const CatalogEntry* entry = catalog.find(verb);
    if (!entry) {
        return ParseError{ParseError::Reason::UnknownVerb, "unknown verb [" + verb + "]"};
    }
    std::vector<ObjectRef> args;
    while (!cur.done()) {
        auto ref = read_object_ref(cur);
        if (!ref) {
            return ParseError{ParseError::Reason::Malformed,
                              "malformed argument after [" + verb + "]: " + text};
        }
        args.push_back(std::move(*ref));
        if (args.size() > 2) break;
    }
    if (static_cast<int>(args.size()) != entry->arity) {
        return ParseError{ParseError::Reason::ArityMismatch,
                          "[" + verb + "] takes " + std::to_string(entry->arity) +
                              " argument(s), got " + std::to_string(args.size())};
    }
    return ActionStep{verb, std::move(args)};
}

std::string render_step(const ActionStep& step) {
    std::string out = "[" + step.verb + "]";
    for (const auto& arg : step.args) {
        out += " " + arg.render();
    }
    return out;
}

std::string render_step(const PassToken&) { return "[Pass]"; }

std::string render_step(const TranslationResult& result) {
    if (const auto* step = std::get_if<ActionStep>(&result)) return render_step(*step);
    if (std::holds_alternative<PassToken>(result)) return "[Pass]";
    return "<parse error>";
}

std::vector<ScriptLine> parse_script(const std::string& text, const ActionCatalog& catalog) {
    std::vector<ScriptLine> out;
    std::istringstream iss(text);
    std::string line;
    int line_number = 0;
    while (std::getline(iss, line)) {
        ++line_number;
        bool blank = true;
        for (char c : line) {
            if (!std::isspace(static_cast<unsigned char>(c))) {
                blank = false;
                break;
            }
        }
        if (blank) continue;
        out.push_back(ScriptLine{line_number, parse_step(line, catalog)});
    }
    return out;
}

std::vector<std::string> script_errors(const std::vector<ScriptLine>& lines) {
    std::vector<std::string> errs;
    for (const auto& l : lines) {
        if (const auto* err = std::get_if<ParseError>(&l.result)) {
            errs.push_back("line " + std::to_string(l.line_number) + ": " + err->message);
        }
    }
    return errs;
}

}  // namespace taskloop

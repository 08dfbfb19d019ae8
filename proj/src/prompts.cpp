#include "taskloop/prompts.hpp"

#include <fstream>
#include <sstream>

namespace taskloop::prompts {

PromptTemplate PromptTemplate::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw TemplateError("cannot open template file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return PromptTemplate(buf.str());
}

std::string PromptTemplate::render(const std::map<std::string, std::string>& values) const {
    std::string out;
    out.reserve(text_.size());
    for (size_t i = 0; i < text_.size(); ++i) {
        char c = text_[i];
        if (c == '{' && i + 1 < text_.size() && text_[i + 1] == '{') {
            out.push_back('{');
            ++i;
            continue;
        }
        if (c == '}' && i + 1 < text_.size() && text_[i + 1] == '}') {
            out.push_back('}');
            ++i;
            continue;
        }
        if (c == '{') {
            auto end = text_.find('}', i + 1);
            if (end == std::string::npos) throw TemplateError("unterminated placeholder");
            std::string name = text_.substr(i + 1, end - i - 1);
            auto it = values.find(name);
            if (it == values.end()) throw TemplateError("no value for placeholder {" + name + "}");
            out += it->second;
            i = end;
            continue;
        }
        out.push_back(c);
    }
    return out;
}

std::string format_exemplars(const std::vector<Exemplar>& exemplars,
                             const std::string& input_label,
                             const std::string& output_label) {
    std::ostringstream out;
    for (const auto& ex : exemplars) {
        out << "### Example\n"
            << input_label << ": " << ex.input << "\n"
            << output_label << ":\n"
            << ex.output << "\n\n";
    }
    return out.str();
}

PromptSet PromptSet::load(const std::string& dir) {
    PromptSet set;
    set.master = PromptTemplate::from_file(dir + "/master.txt");
    set.planning_user = PromptTemplate::from_file(dir + "/planning_user.txt");
    set.feedback_user = PromptTemplate::from_file(dir + "/feedback_user.txt");
    set.format_reminder = PromptTemplate::from_file(dir + "/format_reminder.txt");
    set.body_system = PromptTemplate::from_file(dir + "/body_system.txt");
    set.body_user = PromptTemplate::from_file(dir + "/body_user.txt");
    return set;
}

PromptSet PromptSet::builtin() {
    return load(std::string(TASKLOOP_DATA_DIR) + "/prompts");
}

}  // namespace taskloop::prompts

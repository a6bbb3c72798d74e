#include "cuecraft/templates.hpp"

#include "cuecraft/errors.hpp"
#include "cuecraft/text.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace cuecraft {
namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Calls fn(begin, end, name) for every `{name}` in text, where [begin, end) spans the braces.
template <typename Fn>
void scan_placeholders(std::string_view text, Fn&& fn) {
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '{' || i + 1 >= text.size() || !is_ident_start(text[i + 1])) {
            continue;
        }
        std::size_t j = i + 1;
        while (j < text.size() && is_ident_char(text[j])) {
            ++j;
        }
        if (j < text.size() && text[j] == '}') {
            fn(i, j + 1, text.substr(i + 1, j - i - 1));
            i = j;
        }
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw TemplateError("cannot read template file " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

std::set<std::string> find_placeholders(std::string_view text) {
    std::set<std::string> names;
    scan_placeholders(text, [&](std::size_t, std::size_t, std::string_view name) { names.emplace(name); });
    return names;
}

std::string substitute(std::string_view text, const Variables& vars, std::string_view context_id) {
    std::string out;
    std::size_t cursor = 0;
    scan_placeholders(text, [&](std::size_t begin, std::size_t end, std::string_view name) {
        auto it = vars.find(std::string(name));
        if (it == vars.end()) {
            throw TemplateError("template '" + std::string(context_id) + "': unbound placeholder {" +
                                std::string(name) + "}");
        }
        out.append(text.substr(cursor, begin - cursor));
        out.append(it->second);
        cursor = end;
    });
    out.append(text.substr(cursor));
    return out;
}

PromptTemplate::PromptTemplate(std::string id, std::string_view source) : id_(std::move(id)) {
    std::string system;
    std::string user;
    std::string* target = &user;
    std::istringstream lines{std::string(source)};
    std::string line;
    while (std::getline(lines, line)) {
        const std::string t = trim(line);
        if (t == "[system]") {
            target = &system;
        } else if (t == "[user]") {
            target = &user;
        } else {
            target->append(line);
            target->push_back('\n');
        }
    }
    system_ = trim(system);
    user_ = trim(user);
    placeholders_ = find_placeholders(system_);
    placeholders_.merge(find_placeholders(user_));
}

std::vector<ChatMessage> PromptTemplate::render(const Variables& vars) const {
    std::vector<ChatMessage> messages;
    if (!system_.empty()) {
        messages.push_back({"system", substitute(system_, vars, id_)});
    }
    messages.push_back({"user", substitute(user_, vars, id_)});
    return messages;
}

TemplateRegistry TemplateRegistry::load(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) {
        throw TemplateError("template directory not found: " + dir.string());
    }
    TemplateRegistry registry;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".txt") {
            continue;
        }
        fs::path rel = fs::relative(entry.path(), dir);
        rel.replace_extension();
        registry.add(rel.generic_string(), read_file(entry.path()));
    }
    if (registry.templates_.empty()) {
        throw TemplateError("template directory is empty: " + dir.string());
    }
    return registry;
}

void TemplateRegistry::add(const std::string& id, std::string_view source) {
    templates_.insert_or_assign(id, PromptTemplate(id, source));
}

bool TemplateRegistry::contains(const std::string& id) const { return templates_.count(id) != 0; }

const PromptTemplate& TemplateRegistry::get(const std::string& id) const {
    auto it = templates_.find(id);
    if (it == templates_.end()) {
        throw TemplateError("unknown template '" + id + "'");
    }
    return it->second;
}

std::vector<std::string> TemplateRegistry::ids() const {
    std::vector<std::string> out;
    out.reserve(templates_.size());
    for (const auto& [id, _] : templates_) {
        out.push_back(id);
    }
    return out;
}

std::filesystem::path default_data_dir() {
    if (const char* env = std::getenv("CUECRAFT_DATA_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    std::filesystem::path build_dir = CUECRAFT_BUILD_DATA_DIR;
    if (std::filesystem::is_directory(build_dir)) {
        return build_dir;
    }
    return CUECRAFT_INSTALL_DATA_DIR;
}

} // namespace cuecraft

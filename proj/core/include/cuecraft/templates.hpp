#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace cuecraft {

using Variables = std::map<std::string, std::string>;

struct ChatMessage {
    std::string role;
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

/// A prompt with `{placeholder}` slots. A file may be split into `[system]` and
/// `[user]` sections; without headers the whole text is the user message.
class PromptTemplate {
public:
    PromptTemplate() = default;
    PromptTemplate(std::string id, std::string_view source);

    const std::string& id() const noexcept { return id_; }
    const std::set<std::string>& placeholders() const noexcept { return placeholders_; }
    const std::string& system_text() const noexcept { return system_; }
    const std::string& user_text() const noexcept { return user_; }

    /// Throws TemplateError when a placeholder is not bound by `vars`. Extra
    /// variables are ignored.
    std::vector<ChatMessage> render(const Variables& vars) const;

private:
    std::string id_;
    std::string system_;
    std::string user_;
    std::set<std::string> placeholders_;
};

/// Substitutes `{name}` placeholders in `text`. Unbound names throw TemplateError.
std::string substitute(std::string_view text, const Variables& vars, std::string_view context_id);

/// Every `{name}` placeholder appearing in `text`.
std::set<std::string> find_placeholders(std::string_view text);

/// Templates and auxiliary texts (checklists, participant profiles) keyed by their
/// path relative to the registry root, without the `.txt` extension:
/// `judge_pair`, `checklists/coherence`, `profiles/quiet`.
class TemplateRegistry {
public:
    static TemplateRegistry load(const std::filesystem::path& dir);

    void add(const std::string& id, std::string_view source);
    bool contains(const std::string& id) const;
    const PromptTemplate& get(const std::string& id) const;
    std::vector<std::string> ids() const;

private:
    std::map<std::string, PromptTemplate> templates_;
};

/// Directory holding the bundled templates, rules, lexicon and sample data.
/// `CUECRAFT_DATA_DIR` overrides the compiled-in location.
std::filesystem::path default_data_dir();

} // namespace cuecraft

#include "cuecraft/backends.hpp"

#include "cuecraft/text.hpp"

#include <fstream>

namespace cuecraft {
namespace {

std::string reply_text(const nlohmann::json& value) {
    return value.is_string() ? value.get<std::string>() : value.dump();
}

Variables read_string_map(const nlohmann::json& obj, const char* field, std::size_t index) {
    Variables out;
    if (!obj.contains(field)) {
        return out;
    }
    const auto& m = obj.at(field);
    if (!m.is_object()) {
        throw ConfigError("mock entry " + std::to_string(index) + ": \"" + field + "\" must be an object");
    }
    for (const auto& [k, v] : m.items()) {
        out[k] = reply_text(v);
    }
    return out;
}

std::string apply_filter(const std::string& value, std::string_view filter) {
    if (filter.empty()) {
        return value;
    }
    auto sentences = segment_sentences(value);
    if (filter == "first_sentence") {
        return sentences.empty() ? std::string() : sentences.front();
    }
    if (filter == "drop_first_sentence" && !sentences.empty()) {
        sentences.erase(sentences.begin());
        return join(sentences, " ");
    }
    if (filter == "drop_last_sentence" && !sentences.empty()) {
        sentences.pop_back();
        return join(sentences, " ");
    }
    if (filter == "drop_first_sentence" || filter == "drop_last_sentence") {
        return value;
    }
    throw TransportError("mock reply uses unknown filter '" + std::string(filter) + "'", false);
}

} // namespace

bool MockRule::matches(const OracleRequest& request) const {
    if (fingerprint) {
        return *fingerprint == cuecraft::fingerprint(request);
    }
    if (kind && *kind != request.kind) {
        return false;
    }
    if (template_id && *template_id != request.template_id) {
        return false;
    }
    for (const auto& [key, value] : when) {
        auto it = request.variables.find(key);
        if (it == request.variables.end() || it->second != value) {
            return false;
        }
    }
    for (const auto& [key, needle] : contains) {
        auto it = request.variables.find(key);
        if (it == request.variables.end() || it->second.find(needle) == std::string::npos) {
            return false;
        }
    }
    return true;
}

std::string expand_mock_reply(std::string_view reply, const Variables& vars) {
    std::string out;
    std::size_t pos = 0;
    while (pos < reply.size()) {
        const auto open = reply.find("{{", pos);
        if (open == std::string_view::npos) {
            break;
        }
        const auto close = reply.find("}}", open + 2);
        if (close == std::string_view::npos) {
            break;
        }
        out.append(reply.substr(pos, open - pos));
        std::string_view ref = reply.substr(open + 2, close - open - 2);
        std::string_view filter;
        if (auto bar = ref.find('|'); bar != std::string_view::npos) {
            filter = ref.substr(bar + 1);
            ref = ref.substr(0, bar);
        }
        auto it = vars.find(std::string(ref));
        if (it == vars.end()) {
            throw TransportError("mock reply references unknown variable '" + std::string(ref) + "'", false);
        }
        out.append(apply_filter(it->second, filter));
        pos = close + 2;
    }
    out.append(reply.substr(pos));
    return out;
}

MockBackend::MockBackend(std::vector<MockRule> rules) : rules_(std::move(rules)) {
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        if (rules_[i].replies.empty()) {
            throw ConfigError("mock entry " + std::to_string(i) + " has no reply");
        }
        if (rules_[i].fingerprint) {
            by_fingerprint_.emplace(*rules_[i].fingerprint, i);
        }
    }
}

MockBackend MockBackend::from_json(const nlohmann::json& script) {
    if (!script.is_object() || !script.contains("entries") || !script.at("entries").is_array()) {
        throw ConfigError("mock script must be an object with an \"entries\" array");
    }
    std::vector<MockRule> rules;
    std::size_t index = 0;
    for (const auto& e : script.at("entries")) {
        if (!e.is_object()) {
            throw ConfigError("mock entry " + std::to_string(index) + " must be an object");
        }
        MockRule rule;
        if (e.contains("fingerprint")) {
            rule.fingerprint = e.at("fingerprint").get<std::string>();
        } else if (e.contains("kind_wildcard")) {
            rule.kind = parse_request_kind(e.at("kind_wildcard").get<std::string>());
        } else if (!e.contains("template_id")) {
            throw ConfigError("mock entry " + std::to_string(index) +
                              " needs \"fingerprint\", \"kind_wildcard\" or \"template_id\"");
        }
        if (e.contains("template_id")) {
            rule.template_id = e.at("template_id").get<std::string>();
        }
        rule.when = read_string_map(e, "when", index);
        rule.contains = read_string_map(e, "contains", index);
        if (e.contains("replies")) {
            for (const auto& r : e.at("replies")) {
                rule.replies.push_back(reply_text(r));
            }
        } else if (e.contains("reply")) {
            rule.replies.push_back(reply_text(e.at("reply")));
        }
        rules.push_back(std::move(rule));
        ++index;
    }
    return MockBackend(std::move(rules));
}

MockBackend MockBackend::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open mock script " + path.string());
    }
    auto script = nlohmann::json::parse(in, nullptr, false);
    if (script.is_discarded()) {
        throw ConfigError("mock script is not valid JSON: " + path.string());
    }
    return from_json(script);
}

Completion MockBackend::complete(const PromptRequest& prompt) {
    const MockRule* rule = nullptr;
    if (auto it = by_fingerprint_.find(prompt.fingerprint); it != by_fingerprint_.end()) {
        rule = &rules_[it->second];
    } else {
        for (const auto& r : rules_) {
            if (!r.fingerprint && r.matches(prompt.request)) {
                rule = &r;
                break;
            }
        }
    }
    if (rule == nullptr) {
        throw TransportError("mock script has no reply for " + std::string(to_string(prompt.request.kind)) +
                                 " request '" + prompt.request.template_id + "' (fingerprint " +
                                 prompt.fingerprint + ")",
                             false);
    }
    const std::size_t pick =
        rule->replies.size() == 1 ? 0 : std::stoull(prompt.fingerprint, nullptr, 16) % rule->replies.size();
    return {expand_mock_reply(rule->replies[pick], prompt.request.variables), {}, {}};
}

} // namespace cuecraft

#pragma once

#include "cuecraft/oracle.hpp"

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cuecraft {

/// One scripted reply rule. A rule either pins an exact request fingerprint or
/// acts as a wildcard for a request kind, optionally narrowed by template id,
/// exact variable values (`when`) and variable substrings (`contains`).
struct MockRule {
    std::optional<std::string> fingerprint;
    std::optional<RequestKind> kind;
    std::optional<std::string> template_id;
    Variables when;
    Variables contains;
    /// One reply, or several: the reply is then picked by fingerprint hash.
    std::vector<std::string> replies;

    bool matches(const OracleRequest& request) const;
};

/// Deterministic scripted backend. Fingerprint rules win; otherwise the first
/// matching wildcard rule in script order answers. Replies may reference request
/// variables as `{{name}}`, or `{{name|filter}}` with filter one of
/// `first_sentence`, `drop_first_sentence`, `drop_last_sentence`. The rule table is
/// immutable after construction, so concurrent calls are safe.
class MockBackend final : public Backend {
public:
    explicit MockBackend(std::vector<MockRule> rules);

    /// Script schema: `{"entries": [{"fingerprint"|"kind_wildcard"|"template_id": ..., "when": {...},
    /// "contains": {...}, "reply"|"replies": ...}]}`.
    static MockBackend from_json(const nlohmann::json& script);
    static MockBackend load(const std::filesystem::path& path);

    Completion complete(const PromptRequest& request) override;

    std::size_t size() const noexcept { return rules_.size(); }

private:
    std::vector<MockRule> rules_;
    std::map<std::string, std::size_t> by_fingerprint_;
};

/// Expands `{{name}}` / `{{name|filter}}` references against request variables.
std::string expand_mock_reply(std::string_view reply, const Variables& vars);

struct LiveSettings {
    std::string endpoint = "http://localhost:8000";
    std::string model;
    std::string api_key;
    int max_in_flight = 4;
    std::chrono::seconds timeout{120};
};

/// Chat-completions request body for an OpenAI-compatible server.
nlohmann::json build_chat_payload(const PromptRequest& request, const std::string& model);
/// Extracts the first choice's message content and the reported token usage.
/// Throws TransportError (non-retryable) for bodies without a message.
Completion parse_chat_response(std::string_view body);

/// Splits an endpoint URL into scheme+authority and the chat-completions path.
struct EndpointParts {
    std::string origin;
    std::string path;
};
EndpointParts split_endpoint(const std::string& endpoint);

/// OpenAI-compatible `POST /v1/chat/completions` client with at most
/// `max_in_flight` concurrent requests. HTTP 429/5xx and connection failures are
/// reported as retryable TransportErrors; other 4xx codes are not.
class LiveBackend final : public Backend {
public:
    explicit LiveBackend(LiveSettings settings);
    Completion complete(const PromptRequest& request) override;

private:
    LiveSettings settings_;
    EndpointParts endpoint_;
    std::mutex mutex_;
    std::condition_variable slot_freed_;
    int in_flight_ = 0;
};

} // namespace cuecraft

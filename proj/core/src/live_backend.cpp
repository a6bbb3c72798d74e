#include "cuecraft/backends.hpp"

#include <httplib.h>

namespace cuecraft {
namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

class InFlightSlot {
public:
    InFlightSlot(std::mutex& m, std::condition_variable& cv, int& in_flight, int limit)
        : m_(m), cv_(cv), in_flight_(in_flight) {
        std::unique_lock lock(m_);
        cv_.wait(lock, [&] { return in_flight_ < limit; });
        ++in_flight_;
    }
    ~InFlightSlot() {
        {
            std::lock_guard lock(m_);
            --in_flight_;
        }
        cv_.notify_one();
    }
    InFlightSlot(const InFlightSlot&) = delete;
    InFlightSlot& operator=(const InFlightSlot&) = delete;

private:
    std::mutex& m_;
    std::condition_variable& cv_;
    int& in_flight_;
};

} // namespace

EndpointParts split_endpoint(const std::string& endpoint) {
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("endpoint must start with http:// or https://: " + endpoint);
    }
    const auto path_start = endpoint.find('/', scheme_end + 3);
    EndpointParts parts;
    parts.origin = endpoint.substr(0, path_start);
    std::string base = path_start == std::string::npos ? "" : endpoint.substr(path_start);
    while (!base.empty() && base.back() == '/') {
        base.pop_back();
    }
    if (ends_with(base, "/chat/completions")) {
        parts.path = base;
    } else if (ends_with(base, "/v1")) {
        parts.path = base + "/chat/completions";
    } else {
        parts.path = base + "/v1/chat/completions";
    }
    return parts;
}

nlohmann::json build_chat_payload(const PromptRequest& request, const std::string& model) {
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : request.messages) {
        messages.push_back({{"role", m.role}, {"content", m.content}});
    }
    nlohmann::json body{{"model", model},
                        {"messages", std::move(messages)},
                        {"temperature", request.request.sampling.temperature}};
    if (request.request.sampling.seed) {
        body["seed"] = *request.request.sampling.seed;
    }
    return body;
}

Completion parse_chat_response(std::string_view body) {
    auto json = nlohmann::json::parse(body, nullptr, false);
    if (json.is_discarded()) {
        throw TransportError("chat completion response is not JSON", false);
    }
    const auto* content = json.contains("choices") && json["choices"].is_array() && !json["choices"].empty() &&
                                  json["choices"][0].contains("message") &&
                                  json["choices"][0]["message"].contains("content") &&
                                  json["choices"][0]["message"]["content"].is_string()
                              ? &json["choices"][0]["message"]["content"]
                              : nullptr;
    if (content == nullptr) {
        throw TransportError("chat completion response has no message content", false);
    }
    Completion c{content->get<std::string>(), {}, {}};
    if (json.contains("usage") && json["usage"].is_object()) {
        const auto& usage = json["usage"];
        if (usage.contains("prompt_tokens") && usage["prompt_tokens"].is_number_integer()) {
            c.prompt_tokens = usage["prompt_tokens"].get<std::int64_t>();
        }
        if (usage.contains("completion_tokens") && usage["completion_tokens"].is_number_integer()) {
            c.completion_tokens = usage["completion_tokens"].get<std::int64_t>();
        }
    }
    return c;
}

LiveBackend::LiveBackend(LiveSettings settings)
    : settings_(std::move(settings)), endpoint_(split_endpoint(settings_.endpoint)) {
    if (settings_.model.empty()) {
        throw ConfigError("live backend requires a model name");
    }
    if (settings_.max_in_flight < 1) {
        throw ConfigError("max_in_flight must be at least 1");
    }
}

Completion LiveBackend::complete(const PromptRequest& request) {
    InFlightSlot slot(mutex_, slot_freed_, in_flight_, settings_.max_in_flight);

    httplib::Client client(endpoint_.origin);
    client.set_connection_timeout(settings_.timeout);
    client.set_read_timeout(settings_.timeout);
    client.set_write_timeout(settings_.timeout);
    httplib::Headers headers;
    if (!settings_.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + settings_.api_key);
    }
    const std::string body = build_chat_payload(request, settings_.model).dump();
    auto res = client.Post(endpoint_.path, headers, body, "application/json");
    if (!res) {
        throw TransportError("request to " + endpoint_.origin + endpoint_.path +
                                 " failed: " + httplib::to_string(res.error()),
                             true);
    }
    if (res->status == 429 || res->status >= 500) {
        throw TransportError("server returned HTTP " + std::to_string(res->status), true);
    }
    if (res->status < 200 || res->status >= 300) {
        throw TransportError("server rejected request with HTTP " + std::to_string(res->status) + ": " +
                                 res->body.substr(0, 200),
                             false);
    }
    return parse_chat_response(res->body);
}

} // namespace cuecraft

#include "cuecraft/oracle.hpp"

#include "cuecraft/text.hpp"

#include <array>
#include <cmath>
#include <regex>
#include <thread>

namespace cuecraft {
namespace {

constexpr std::array<std::pair<RequestKind, std::string_view>, 8> kKindNames = {{
    {RequestKind::Generate, "Generate"},
    {RequestKind::ScoreFragment, "ScoreFragment"},
    {RequestKind::ScoreContext, "ScoreContext"},
    {RequestKind::DescribeBehavior, "DescribeBehavior"},
    {RequestKind::Judge, "Judge"},
    {RequestKind::SimulateResponse, "SimulateResponse"},
    {RequestKind::ScoreCreativity, "ScoreCreativity"},
    {RequestKind::SelectOption, "SelectOption"},
}};

constexpr std::string_view kBuiltinRepair =
    "Your previous reply could not be used: {error}\n"
    "Reply again, following the requested format exactly and adding nothing else.";

std::int64_t count_prompt_tokens(const std::vector<ChatMessage>& messages) {
    std::int64_t n = 0;
    for (const auto& m : messages) {
        n += whitespace_token_count(m.content);
    }
    return n;
}

} // namespace

std::string_view to_string(RequestKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) {
            return name;
        }
    }
    return "Unknown";
}

RequestKind parse_request_kind(std::string_view name) {
    for (const auto& [k, n] : kKindNames) {
        if (n == name) {
            return k;
        }
    }
    throw ConfigError("unknown request kind '" + std::string(name) + "'");
}

std::string fingerprint(const OracleRequest& request) {
    std::string material = request.template_id;
    material.push_back('\x1f');
    for (const auto& [key, value] : request.variables) {
        material.append(key);
        material.push_back('\x1e');
        material.append(value);
        material.push_back('\x1f');
    }
    material.append("seed=");
    material.append(request.sampling.seed ? std::to_string(*request.sampling.seed) : "none");
    return to_hex(fnv1a64(material));
}

nlohmann::json to_json(const CallTally& tally) {
    nlohmann::json by_kind = nlohmann::json::object();
    for (const auto& [k, v] : tally.calls_by_kind) {
        by_kind[k] = v;
    }
    return {{"calls", tally.calls},
            {"failed_calls", tally.failed_calls},
            {"prompt_tokens", tally.prompt_tokens},
            {"completion_tokens", tally.completion_tokens},
            {"calls_by_kind", by_kind}};
}

std::string_view to_string(JudgeLabel label) {
    switch (label) {
    case JudgeLabel::StrongA: return "A>>B";
    case JudgeLabel::A: return "A>B";
    case JudgeLabel::Tie: return "A=B";
    case JudgeLabel::B: return "B>A";
    case JudgeLabel::StrongB: return "B>>A";
    }
    return "A=B";
}

JudgeLabel swap_sides(JudgeLabel label) {
    switch (label) {
    case JudgeLabel::StrongA: return JudgeLabel::StrongB;
    case JudgeLabel::A: return JudgeLabel::B;
    case JudgeLabel::Tie: return JudgeLabel::Tie;
    case JudgeLabel::B: return JudgeLabel::A;
    case JudgeLabel::StrongB: return JudgeLabel::StrongA;
    }
    return label;
}

double normalize_likert(int rating) {
    if (rating < 1 || rating > 5) {
        throw DomainError("Likert rating out of range [1,5]: " + std::to_string(rating));
    }
    return static_cast<double>(rating - 1) / 4.0;
}

nlohmann::json extract_json_object(std::string_view reply) {
    const auto open = reply.find('{');
    const auto close = reply.rfind('}');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
        throw ReplyFormatError("reply contains no JSON object");
    }
    auto parsed = nlohmann::json::parse(reply.substr(open, close - open + 1), nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) {
        throw ReplyFormatError("reply contains malformed JSON");
    }
    return parsed;
}

double read_number(const nlohmann::json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number()) {
        throw ReplyFormatError(std::string("missing numeric field \"") + key + "\"");
    }
    const double v = it->get<double>();
    if (!std::isfinite(v)) {
        throw ReplyFormatError(std::string("non-finite value for \"") + key + "\"");
    }
    return v;
}

int read_likert(const nlohmann::json& obj, const char* key) {
    const double v = read_number(obj, key);
    if (v != std::floor(v) || v < 1.0 || v > 5.0) {
        throw ReplyFormatError(std::string("\"") + key + "\" must be an integer from 1 to 5");
    }
    return static_cast<int>(v);
}

FragmentScores parse_fragment_scores(std::string_view reply) {
    const auto obj = extract_json_object(reply);
    return {normalize_likert(read_likert(obj, "cue_alignment")),
            normalize_likert(read_likert(obj, "imagery_vividness")),
            normalize_likert(read_likert(obj, "discourse_coherence")),
            normalize_likert(read_likert(obj, "hallucination_risk"))};
}

QualityScores parse_quality_scores(std::string_view reply) {
    const auto obj = extract_json_object(reply);
    auto unit = [&](const char* key) {
        const double v = read_number(obj, key);
        if (v < 0.0 || v > 1.0) {
            throw ReplyFormatError(std::string("\"") + key + "\" must lie in [0,1]");
        }
        return v;
    };
    return {unit("coherence"), unit("relevance"), unit("engagement")};
}

JudgeLabel parse_judge_label(std::string_view reply) {
    static const std::regex pattern(R"(([AB])\s*(>>|\xE2\x89\xAB|>|=)\s*([AB]))");
    std::optional<JudgeLabel> found;
    const std::string text(reply);
    for (auto it = std::sregex_iterator(text.begin(), text.end(), pattern); it != std::sregex_iterator(); ++it) {
        const std::string lhs = (*it)[1];
        const std::string op = (*it)[2];
        const std::string rhs = (*it)[3];
        if (lhs == rhs) {
            continue;
        }
        JudgeLabel label;
        if (op == "=") {
            label = JudgeLabel::Tie;
        } else {
            const bool strong = op != ">";
            label = lhs == "A" ? (strong ? JudgeLabel::StrongA : JudgeLabel::A)
                               : (strong ? JudgeLabel::StrongB : JudgeLabel::B);
        }
        if (found && *found != label) {
            throw ReplyFormatError("reply contains more than one label");
        }
        found = label;
    }
    if (!found) {
        throw ReplyFormatError("reply contains none of the five labels [[A>>B]] [[A>B]] [[A=B]] [[B>A]] [[B>>A]]");
    }
    return *found;
}

Oracle::Oracle(std::shared_ptr<const TemplateRegistry> templates, std::shared_ptr<Backend> backend,
               RetryPolicy retry)
    : templates_(std::move(templates)), backend_(std::move(backend)), retry_(retry),
      sleeper_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }) {
    if (!templates_ || !backend_) {
        throw ConfigError("oracle requires a template registry and a backend");
    }
    if (retry_.attempts < 1) {
        throw ConfigError("retry attempts must be at least 1");
    }
}

std::vector<ChatMessage> Oracle::render(const OracleRequest& request) const {
    auto messages = templates_->get(request.template_id).render(request.variables);
    if (auto it = request.variables.find(kRepairVariable); it != request.variables.end()) {
        const Variables repair_vars{{"error", it->second}};
        std::string note = templates_->contains("repair")
                               ? substitute(templates_->get("repair").user_text(), repair_vars, "repair")
                               : substitute(kBuiltinRepair, repair_vars, "repair");
        messages.push_back({"user", std::move(note)});
    }
    return messages;
}

std::string Oracle::complete(const OracleRequest& request) {
    PromptRequest prompt{request, fingerprint(request), render(request)};
    CallRecord rec{request.kind, request.template_id, prompt.fingerprint, 0, 0, 0, false};
    for (int attempt = 1;; ++attempt) {
        rec.attempts = attempt;
        try {
            Completion c = backend_->complete(prompt);
            rec.ok = true;
            rec.prompt_tokens = c.prompt_tokens.value_or(count_prompt_tokens(prompt.messages));
            rec.completion_tokens = c.completion_tokens.value_or(whitespace_token_count(c.text));
            record(rec);
            return std::move(c.text);
        } catch (const TransportError& e) {
            if (!e.retryable() || attempt >= retry_.attempts) {
                rec.prompt_tokens = count_prompt_tokens(prompt.messages);
                record(rec);
                throw;
            }
            sleeper_(retry_.initial_backoff * (1LL << (attempt - 1)));
        }
    }
}

FragmentScores Oracle::score_fragment(std::string_view fragment, std::string_view history,
                                      std::string_view outline_hint) {
    if (trim(fragment).empty()) {
        throw DomainError("score_fragment requires a non-empty fragment");
    }
    OracleRequest req{RequestKind::ScoreFragment,
                      "score_fragment",
                      {{"fragment", std::string(fragment)},
                       {"history", history.empty() ? "(start of scenario)" : std::string(history)},
                       {"outline_hint", std::string(outline_hint)}},
                      {}};
    return complete_structured(std::move(req), parse_fragment_scores);
}

QualityScores Oracle::score_context(std::string_view text) {
    OracleRequest req{RequestKind::ScoreContext, "score_context", {{"context", std::string(text)}}, {}};
    return complete_structured(std::move(req), parse_quality_scores);
}

JudgeLabel Oracle::judge_pair(std::string_view context_a, std::string_view context_b, std::string_view metric,
                              std::optional<std::int64_t> seed) {
    if (trim(context_a).empty() || trim(context_b).empty()) {
        throw DomainError("judge_pair requires two non-empty contexts");
    }
    const std::string checklist_id = "checklists/" + to_lower(metric);
    if (!templates_->contains(checklist_id)) {
        throw TemplateError("no checklist registered for metric '" + std::string(metric) + "'");
    }
    OracleRequest req{RequestKind::Judge,
                      "judge_pair",
                      {{"metric", std::string(metric)},
                       {"checklist", templates_->get(checklist_id).user_text()},
                       {"context_a", std::string(context_a)},
                       {"context_b", std::string(context_b)}},
                      {0.0, 1, seed}};
    return complete_structured(std::move(req), parse_judge_label);
}

void Oracle::record(CallRecord rec) {
    std::lock_guard lock(mutex_);
    log_.push_back(std::move(rec));
}

std::vector<CallRecord> Oracle::call_log() const {
    std::lock_guard lock(mutex_);
    return log_;
}

CallTally Oracle::tally() const {
    std::lock_guard lock(mutex_);
    CallTally t;
    for (const auto& rec : log_) {
        ++t.calls;
        if (!rec.ok) {
            ++t.failed_calls;
        }
        t.prompt_tokens += rec.prompt_tokens;
        t.completion_tokens += rec.completion_tokens;
        ++t.calls_by_kind[std::string(to_string(rec.kind))];
    }
    return t;
}

void Oracle::set_sleeper(std::function<void(std::chrono::milliseconds)> sleeper) {
    sleeper_ = std::move(sleeper);
}

} // namespace cuecraft

#pragma once

#include "cuecraft/errors.hpp"
#include "cuecraft/templates.hpp"

#include <chrono>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <typeinfo>
#include <vector>

#include <nlohmann/json.hpp>

namespace cuecraft {

enum class RequestKind {
    Generate,
    ScoreFragment,
    ScoreContext,
    DescribeBehavior,
    Judge,
    SimulateResponse,
    ScoreCreativity,
    SelectOption,
};

std::string_view to_string(RequestKind kind);
/// Throws ConfigError for unknown names.
RequestKind parse_request_kind(std::string_view name);

struct SamplingParams {
    double temperature = 0.0;
    int max_candidates = 1;
    std::optional<std::int64_t> seed;
};

struct OracleRequest {
    RequestKind kind = RequestKind::Generate;
    std::string template_id;
    Variables variables;
    SamplingParams sampling;
};

/// Variable carrying the error explanation on a repair re-ask. It is part of the
/// fingerprint, so scripted backends can answer repairs differently.
inline constexpr const char* kRepairVariable = "__repair";

/// Hash of template id, sorted variables and sampling seed, as 16 hex digits.
std::string fingerprint(const OracleRequest& request);

/// A request after template rendering, as seen by a backend.
struct PromptRequest {
    const OracleRequest& request;
    std::string fingerprint;
    std::vector<ChatMessage> messages;
};

struct Completion {
    std::string text;
    std::optional<std::int64_t> prompt_tokens;
    std::optional<std::int64_t> completion_tokens;
};

/// Transport behind the oracle. Implementations must be safe to call concurrently.
class Backend {
public:
    virtual ~Backend() = default;
    virtual Completion complete(const PromptRequest& request) = 0;
};

/// Backend driven by a callable; used for programmatic scripting in tests and tools.
class FunctionBackend final : public Backend {
public:
    using Fn = std::function<std::string(const PromptRequest&)>;
    explicit FunctionBackend(Fn fn) : fn_(std::move(fn)) {}
    Completion complete(const PromptRequest& request) override { return {fn_(request), {}, {}}; }

private:
    Fn fn_;
};

struct RetryPolicy {
    int attempts = 3;
    std::chrono::milliseconds initial_backoff{500};
};

struct CallRecord {
    RequestKind kind;
    std::string template_id;
    std::string fingerprint;
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
    int attempts = 0;
    bool ok = false;
};

struct CallTally {
    std::int64_t calls = 0;
    std::int64_t failed_calls = 0;
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
    std::map<std::string, std::int64_t> calls_by_kind;
};

nlohmann::json to_json(const CallTally& tally);

/// Multi-aspect fragment scores, each normalized from a 1-5 Likert rating.
struct FragmentScores {
    double s_sc = 0.0; ///< cue alignment
    double s_im = 0.0; ///< imagery vividness
    double s_co = 0.0; ///< discourse coherence
    double s_ha = 0.0; ///< hallucination risk
};

struct QualityScores {
    double s_coh = 0.0;
    double s_rel = 0.0;
    double s_eng = 0.0;
};

/// Five ordered pairwise preferences.
enum class JudgeLabel { StrongA, A, Tie, B, StrongB };

std::string_view to_string(JudgeLabel label);
/// The same judgment expressed with the two contexts swapped.
JudgeLabel swap_sides(JudgeLabel label);

/// Maps a rating in [1, 5] to (rating - 1) / 4. Throws DomainError otherwise.
double normalize_likert(int rating);

/// Finds the outermost JSON object in a model reply (tolerates prose and code
/// fences around it). Throws ReplyFormatError when none parses.
nlohmann::json extract_json_object(std::string_view reply);

/// Reads an integer Likert rating from `obj[key]`. Throws ReplyFormatError.
int read_likert(const nlohmann::json& obj, const char* key);
/// Reads a number from `obj[key]`. Throws ReplyFormatError.
double read_number(const nlohmann::json& obj, const char* key);

FragmentScores parse_fragment_scores(std::string_view reply);
QualityScores parse_quality_scores(std::string_view reply);
/// Exactly one label token such as `[[A>B]]`; anything else is a ReplyFormatError.
JudgeLabel parse_judge_label(std::string_view reply);

/// The single gateway through which every model call is made. Renders templates,
/// retries transient transport failures, and keeps a call log for accounting.
/// Thread-safe.
class Oracle {
public:
    Oracle(std::shared_ptr<const TemplateRegistry> templates, std::shared_ptr<Backend> backend,
           RetryPolicy retry = {});

    /// Raw model text. Throws TemplateError (unknown template or unbound
    /// placeholder) without contacting the backend, TransportError after retries.
    std::string complete(const OracleRequest& request);

    /// Issues the request and parses the reply. On ReplyFormatError the request is
    /// re-asked once with the error explained. If the repair also fails, a plain
    /// ReplyFormatError becomes ScoreParseError; subclasses (ChoiceOutOfPool,
    /// NoOpMutation) are rethrown as-is.
    template <typename Parse>
    auto complete_structured(OracleRequest request, Parse&& parse)
        -> std::invoke_result_t<Parse&, std::string_view>;

    FragmentScores score_fragment(std::string_view fragment, std::string_view history,
                                  std::string_view outline_hint);
    QualityScores score_context(std::string_view text);
    /// `metric` names a checklist registered as `checklists/<metric, lowercased>`.
    JudgeLabel judge_pair(std::string_view context_a, std::string_view context_b, std::string_view metric,
                          std::optional<std::int64_t> seed = std::nullopt);

    std::vector<ChatMessage> render(const OracleRequest& request) const;

    const TemplateRegistry& templates() const noexcept { return *templates_; }
    std::vector<CallRecord> call_log() const;
    CallTally tally() const;

    /// Replaces the sleep used between retries (tests use a no-op).
    void set_sleeper(std::function<void(std::chrono::milliseconds)> sleeper);

private:
    void record(CallRecord rec);

    std::shared_ptr<const TemplateRegistry> templates_;
    std::shared_ptr<Backend> backend_;
    RetryPolicy retry_;
    std::function<void(std::chrono::milliseconds)> sleeper_;
    mutable std::mutex mutex_;
    std::vector<CallRecord> log_;
};

template <typename Parse>
auto Oracle::complete_structured(OracleRequest request, Parse&& parse)
    -> std::invoke_result_t<Parse&, std::string_view> {
    std::exception_ptr last;
    std::string last_message;
    bool generic = true;
    for (int attempt = 0; attempt < 2; ++attempt) {
        const std::string reply = complete(request);
        try {
            return parse(std::string_view(reply));
        } catch (const ReplyFormatError& e) {
            last = std::current_exception();
            last_message = e.what();
            generic = typeid(e) == typeid(ReplyFormatError);
            request.variables[kRepairVariable] = e.what();
        }
    }
    if (!generic) {
        std::rethrow_exception(last);
    }
    throw ScoreParseError("unusable reply to '" + request.template_id + "' after repair: " + last_message);
}

} // namespace cuecraft

#include "cuecraft/refiner.hpp"

#include "cuecraft/text.hpp"

#include <numeric>

namespace cuecraft {

std::vector<ParticipantProfile> default_profiles(const TemplateRegistry& templates) {
    std::vector<ParticipantProfile> out;
    for (const char* name : {"Talkative", "Normal", "Quiet"}) {
        const auto& t = templates.get("profiles/" + to_lower(name));
        out.push_back({name, trim(t.user_text())});
    }
    return out;
}

std::vector<SimulatedResponse> simulate_responses(const Context& context,
                                                  const std::vector<ParticipantProfile>& profiles, Oracle& oracle) {
    if (profiles.empty()) {
        throw DomainError("at least one participant profile is required");
    }
    std::vector<SimulatedResponse> out;
    for (const auto& p : profiles) {
        OracleRequest req{RequestKind::SimulateResponse,
                          "simulate_response",
                          {{"profile", p.prompt_fragment}, {"context", context.text}},
                          {0.0, 1, std::nullopt}};
        std::string text = trim(oracle.complete(req));
        if (text.empty()) {
            throw EmptyGeneration("profile " + p.name + " produced no response for " + context.context_id);
        }
        out.push_back({p.name, std::move(text)});
    }
    return out;
}

double score_creativity(const Context& context, const std::string& response, Oracle& oracle) {
    OracleRequest req{RequestKind::ScoreCreativity,
                      "score_creativity",
                      {{"context", context.text}, {"response", response}},
                      {}};
    return oracle.complete_structured(std::move(req), [](std::string_view reply) {
        return normalize_likert(read_likert(extract_json_object(reply), "rating"));
    });
}

double effectiveness(const std::vector<double>& scores) {
    if (scores.empty()) {
        throw DomainError("effectiveness needs at least one score");
    }
    return std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
}

std::string_view to_string(Verdict v) {
    switch (v) {
    case Verdict::Ready: return "Ready";
    case Verdict::RouteBack: return "RouteBack";
    case Verdict::ReadyWithWarning: return "ReadyWithWarning";
    }
    return "Ready";
}

nlohmann::json to_json(const EffectivenessReport& report) {
    nlohmann::json responses = nlohmann::json::array();
    for (const auto& r : report.responses) {
        responses.push_back({{"profile", r.profile}, {"response", r.response}, {"score", r.score}});
    }
    return {{"context_id", report.context_id},
            {"responses", std::move(responses)},
            {"psi", report.psi},
            {"verdict", to_string(report.verdict)},
            {"cycle", report.cycle}};
}

void RefinementLedger::record(const EffectivenessReport& report) {
    if (report.verdict == Verdict::RouteBack) {
        ++route_backs_[report.context_id];
    }
}

int RefinementLedger::route_backs(const Context& context) const {
    int total = 0;
    auto add = [&](const std::string& id) {
        if (auto it = route_backs_.find(id); it != route_backs_.end()) {
            total += it->second;
        }
    };
    add(context.context_id);
    for (const auto& id : context.lineage) {
        add(id);
    }
    return total;
}

EffectivenessReport refine(const Context& context, const RefinerOptions& options, Oracle& oracle,
                           RefinementLedger& ledger) {
    if (trim(context.text).empty()) {
        throw DomainError("cannot refine an empty context");
    }
    if (options.threshold < 0 || options.threshold > 1 || options.max_cycles < 1) {
        throw DomainError("threshold must lie in [0,1] and max_cycles must be positive");
    }
    EffectivenessReport report;
    report.context_id = context.context_id;
    std::vector<double> scores;
    for (auto& r : simulate_responses(context, options.profiles, oracle)) {
        const double s = score_creativity(context, r.response, oracle);
        scores.push_back(s);
        report.responses.push_back({std::move(r.profile), std::move(r.response), s});
    }
    report.psi = effectiveness(scores);
    const int prior = ledger.route_backs(context);
    if (report.psi > options.threshold) {
        report.verdict = Verdict::Ready;
        report.cycle = prior;
    } else if (prior >= options.max_cycles) {
        report.verdict = Verdict::ReadyWithWarning;
        report.cycle = prior;
    } else {
        report.verdict = Verdict::RouteBack;
        report.cycle = prior + 1;
    }
    ledger.record(report);
    return report;
}

} // namespace cuecraft

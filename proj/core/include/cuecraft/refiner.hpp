#pragma once

#include "cuecraft/context.hpp"
#include "cuecraft/oracle.hpp"
#include "cuecraft/templates.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace cuecraft {

struct ParticipantProfile {
    std::string name;
    std::string prompt_fragment;
};

/// Talkative, Normal and Quiet, read from the `profiles/*` templates.
std::vector<ParticipantProfile> default_profiles(const TemplateRegistry& templates);

struct SimulatedResponse {
    std::string profile;
    std::string response;
};

/// One SimulateResponse call per profile at temperature 0, in profile order.
/// Throws EmptyGeneration when a profile yields no text.
std::vector<SimulatedResponse> simulate_responses(const Context& context,
                                                  const std::vector<ParticipantProfile>& profiles, Oracle& oracle);

/// Creativity of one response as a normalized Likert rating.
double score_creativity(const Context& context, const std::string& response, Oracle& oracle);

/// Arithmetic mean. Throws DomainError for an empty list.
double effectiveness(const std::vector<double>& scores);

enum class Verdict { Ready, RouteBack, ReadyWithWarning };
std::string_view to_string(Verdict v);

struct ScoredResponse {
    std::string profile;
    std::string response;
    double score = 0.0;
};

struct EffectivenessReport {
    std::string context_id;
    std::vector<ScoredResponse> responses;
    double psi = 0.0;
    Verdict verdict = Verdict::Ready;
    /// Number of route-backs in this context's lineage, including this report's.
    int cycle = 0;
};

nlohmann::json to_json(const EffectivenessReport& report);

/// Remembers route-back verdicts so repeated failures along one lineage stop.
class RefinementLedger {
public:
    void record(const EffectivenessReport& report);
    /// Route-backs recorded for the context itself or any of its ancestors.
    int route_backs(const Context& context) const;

private:
    std::map<std::string, int> route_backs_;
};

struct RefinerOptions {
    double threshold = 0.6;
    int max_cycles = 3;
    std::vector<ParticipantProfile> profiles;
};

/// Ready when psi strictly exceeds the threshold. Otherwise RouteBack, until the
/// lineage has already been routed back `max_cycles` times, which yields
/// ReadyWithWarning. The report is recorded in the ledger.
EffectivenessReport refine(const Context& context, const RefinerOptions& options, Oracle& oracle,
                           RefinementLedger& ledger);

} // namespace cuecraft

#pragma once

#include "cuecraft/oracle.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cuecraft {

/// Presentation order of one judgment.
enum class PairOrder { AB, BA };

/// Four judgments of one pair, all expressed in the (a, b) frame.
struct PairVerdictSet {
    std::string metric;
    std::string context_a_id;
    std::string context_b_id;
    std::vector<JudgeLabel> labels;
    std::vector<PairOrder> orders;
    bool valid = true;
    std::string error;
};

struct ArenaText {
    std::string id;
    std::string text;
};

/// Judges (a,b), (b,a), (a,b), (b,a). Swapped judgments are turned back into the
/// (a,b) frame. A failed judgment marks the set invalid instead of throwing;
/// DomainError is raised for empty texts.
PairVerdictSet run_pair(const ArenaText& a, const ArenaText& b, const std::string& metric, Oracle& oracle);

struct MetricReport {
    std::string metric;
    std::string method;
    double positive_rate = 0.0;
    std::int64_t wins = 0;
    std::int64_t ties = 0;
    std::int64_t losses = 0;
    std::int64_t n_pairs = 0;
    std::int64_t invalid_pairs = 0;
};

nlohmann::json to_json(const MetricReport& report);
nlohmann::json to_json(const PairVerdictSet& set);

/// Aggregates labels from the candidate's side (side A unless `candidate_is_a`
/// is false): win 1, tie 0.5, loss 0. Invalid sets are counted and skipped.
/// Throws NoValidVerdicts when nothing valid remains.
MetricReport positive_rate(const std::vector<PairVerdictSet>& verdicts, const std::string& method,
                           bool candidate_is_a = true);

/// The six subjective metrics with bundled checklists.
const std::vector<std::string>& arena_metrics();

} // namespace cuecraft

#include "cuecraft/arena.hpp"

#include "cuecraft/text.hpp"

namespace cuecraft {

PairVerdictSet run_pair(const ArenaText& a, const ArenaText& b, const std::string& metric, Oracle& oracle) {
    if (trim(a.text).empty() || trim(b.text).empty()) {
        throw DomainError("arena comparison needs two non-empty texts");
    }
    PairVerdictSet set{metric, a.id, b.id, {}, {}, true, {}};
    for (int round = 0; round < 2; ++round) {
        for (PairOrder order : {PairOrder::AB, PairOrder::BA}) {
            try {
                if (order == PairOrder::AB) {
                    set.labels.push_back(oracle.judge_pair(a.text, b.text, metric, round));
                } else {
                    set.labels.push_back(swap_sides(oracle.judge_pair(b.text, a.text, metric, round)));
                }
                set.orders.push_back(order);
            } catch (const Error& e) {
                set.valid = false;
                set.error = e.what();
                return set;
            }
        }
    }
    return set;
}

nlohmann::json to_json(const MetricReport& r) {
    return {{"metric", r.metric},   {"method", r.method}, {"positive_rate", r.positive_rate},
            {"wins", r.wins},       {"ties", r.ties},     {"losses", r.losses},
            {"n_pairs", r.n_pairs}, {"invalid_pairs", r.invalid_pairs}};
}

nlohmann::json to_json(const PairVerdictSet& s) {
    nlohmann::json labels = nlohmann::json::array();
    for (auto l : s.labels) {
        labels.push_back(to_string(l));
    }
    nlohmann::json orders = nlohmann::json::array();
    for (auto o : s.orders) {
        orders.push_back(o == PairOrder::AB ? "AB" : "BA");
    }
    return {{"metric", s.metric}, {"a", s.context_a_id}, {"b", s.context_b_id}, {"labels", labels},
            {"orders", orders},   {"valid", s.valid},    {"error", s.error}};
}

MetricReport positive_rate(const std::vector<PairVerdictSet>& verdicts, const std::string& method,
                           bool candidate_is_a) {
    MetricReport r;
    r.method = method;
    for (const auto& set : verdicts) {
        if (r.metric.empty()) {
            r.metric = set.metric;
        }
        if (!set.valid || set.labels.size() != 4) {
            ++r.invalid_pairs;
            continue;
        }
        ++r.n_pairs;
        for (JudgeLabel l : set.labels) {
            const JudgeLabel own = candidate_is_a ? l : swap_sides(l);
            switch (own) {
            case JudgeLabel::StrongA:
            case JudgeLabel::A: ++r.wins; break;
            case JudgeLabel::Tie: ++r.ties; break;
            case JudgeLabel::B:
            case JudgeLabel::StrongB: ++r.losses; break;
            }
        }
    }
    const std::int64_t total = r.wins + r.ties + r.losses;
    if (total == 0) {
        throw NoValidVerdicts("no valid verdict sets for " + (r.metric.empty() ? method : r.metric));
    }
    r.positive_rate = (static_cast<double>(r.wins) + 0.5 * static_cast<double>(r.ties)) / static_cast<double>(total);
    return r;
}

const std::vector<std::string>& arena_metrics() {
    static const std::vector<std::string> metrics{"Coherence",    "Relevance",    "Engagement",
                                                  "Significance", "Concreteness", "Uncertainty"};
    return metrics;
}

} // namespace cuecraft

#include "cuecraft/archive.hpp"

#include <algorithm>
#include <cmath>

namespace cuecraft {
namespace {

int axis_index(double v, int bins) {
    const double scaled = std::floor(std::clamp(v, 0.0, 1.0) * bins);
    return std::min(static_cast<int>(scaled), bins - 1);
}

NicheIndex niche_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 3) {
        throw ConfigError("niche index must be an array of three integers");
    }
    return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>()};
}

InsertOutcome parse_outcome(std::string_view s) {
    for (auto o : {InsertOutcome::InsertedEmpty, InsertOutcome::Replaced, InsertOutcome::RejectedLower,
                   InsertOutcome::RejectedTie}) {
        if (to_string(o) == s) {
            return o;
        }
    }
    throw ConfigError("unknown archive outcome '" + std::string(s) + "'");
}

} // namespace

NicheIndex niche_index(const BehaviorDescriptor& d, int bins) {
    if (bins < 1) {
        throw DomainError("bins must be at least 1");
    }
    return {axis_index(d.phi1, bins), axis_index(d.phi2, bins), axis_index(d.phi3, bins)};
}

BehaviorDescriptor niche_center(const NicheIndex& n, int bins) {
    auto c = [bins](int i) { return (i + 0.5) / bins; };
    return {c(n.i), c(n.j), c(n.k)};
}

std::string_view to_string(InsertOutcome outcome) {
    switch (outcome) {
    case InsertOutcome::InsertedEmpty: return "InsertedEmpty";
    case InsertOutcome::Replaced: return "Replaced";
    case InsertOutcome::RejectedLower: return "RejectedLower";
    case InsertOutcome::RejectedTie: return "RejectedTie";
    }
    return "InsertedEmpty";
}

EliteArchive::EliteArchive(int bins) : bins_(bins) {
    if (bins < 1) {
        throw DomainError("bins must be at least 1");
    }
}

InsertOutcome EliteArchive::try_insert(const Context& candidate) {
    if (!candidate.descriptor || !candidate.fitness) {
        throw DomainError("context " + candidate.context_id + " has no descriptor or fitness");
    }
    const NicheIndex niche = niche_index(*candidate.descriptor, bins_);
    ArchiveEvent ev{generation_, candidate.context_id, niche, InsertOutcome::InsertedEmpty, *candidate.fitness, {}, {}};
    auto it = cells_.find(niche);
    if (it == cells_.end()) {
        cells_.emplace(niche, candidate);
    } else {
        const double incumbent = *it->second.fitness;
        ev.incumbent_id = it->second.context_id;
        ev.incumbent_fitness = incumbent;
        if (*candidate.fitness > incumbent) {
            ev.outcome = InsertOutcome::Replaced;
            it->second = candidate;
        } else if (*candidate.fitness < incumbent) {
            ev.outcome = InsertOutcome::RejectedLower;
        } else {
            ev.outcome = InsertOutcome::RejectedTie;
        }
    }
    events_.push_back(ev);
    return ev.outcome;
}

void EliteArchive::restore(std::vector<Context> elites, int generation, std::vector<ArchiveEvent> events) {
    std::map<NicheIndex, Context> cells;
    for (auto& ctx : elites) {
        const NicheIndex n = niche_index(ctx.descriptor.value_or(BehaviorDescriptor{}), bins_);
        if (!cells.emplace(n, std::move(ctx)).second) {
            throw ConfigError("two elites share one niche");
        }
    }
    cells_ = std::move(cells);
    generation_ = generation;
    events_ = std::move(events);
}

const Context* EliteArchive::elite(const NicheIndex& niche) const {
    auto it = cells_.find(niche);
    return it == cells_.end() ? nullptr : &it->second;
}

const Context* EliteArchive::find(std::string_view context_id) const {
    for (const auto& [niche, ctx] : cells_) {
        if (ctx.context_id == context_id) {
            return &ctx;
        }
    }
    return nullptr;
}

std::vector<NicheIndex> EliteArchive::empty_niches() const {
    std::vector<NicheIndex> out;
    for (int i = 0; i < bins_; ++i) {
        for (int j = 0; j < bins_; ++j) {
            for (int k = 0; k < bins_; ++k) {
                if (!cells_.count({i, j, k})) {
                    out.push_back({i, j, k});
                }
            }
        }
    }
    return out;
}

std::vector<const Context*> EliteArchive::elites() const {
    std::vector<const Context*> out;
    for (const auto& [niche, ctx] : cells_) {
        out.push_back(&ctx);
    }
    return out;
}

nlohmann::json to_json(const NicheIndex& n) { return nlohmann::json::array({n.i, n.j, n.k}); }

nlohmann::json to_json(const EliteArchive& archive) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& [niche, ctx] : archive.cells()) {
        nlohmann::json c = to_json(ctx);
        c["niche"] = to_json(niche);
        cells.push_back(std::move(c));
    }
    nlohmann::json events = nlohmann::json::array();
    for (const auto& e : archive.events()) {
        nlohmann::json ev{{"generation", e.generation},
                          {"context_id", e.context_id},
                          {"niche", to_json(e.niche)},
                          {"outcome", to_string(e.outcome)},
                          {"fitness", e.fitness}};
        ev["incumbent_id"] = e.incumbent_id ? nlohmann::json(*e.incumbent_id) : nlohmann::json(nullptr);
        ev["incumbent_fitness"] = e.incumbent_fitness ? nlohmann::json(*e.incumbent_fitness) : nlohmann::json(nullptr);
        events.push_back(std::move(ev));
    }
    return {{"bins", archive.bins()},
            {"generation", archive.generation()},
            {"cells", std::move(cells)},
            {"events", std::move(events)}};
}

EliteArchive archive_from_json(const nlohmann::json& j) {
    EliteArchive archive(j.at("bins").get<int>());
    std::vector<Context> elites;
    for (const auto& c : j.at("cells")) {
        Context ctx = context_from_json(c);
        if (!ctx.descriptor || !ctx.fitness) {
            throw ConfigError("archive cell " + ctx.context_id + " lacks descriptor or fitness");
        }
        if (niche_index(*ctx.descriptor, archive.bins()) != niche_from_json(c.at("niche"))) {
            throw ConfigError("archive cell " + ctx.context_id + " does not match its descriptor");
        }
        elites.push_back(std::move(ctx));
    }
    std::vector<ArchiveEvent> events;
    for (const auto& e : j.value("events", nlohmann::json::array())) {
        ArchiveEvent ev;
        ev.generation = e.at("generation").get<int>();
        ev.context_id = e.at("context_id").get<std::string>();
        ev.niche = niche_from_json(e.at("niche"));
        ev.outcome = parse_outcome(e.at("outcome").get<std::string>());
        ev.fitness = e.at("fitness").get<double>();
        if (e.contains("incumbent_id") && !e["incumbent_id"].is_null()) {
            ev.incumbent_id = e["incumbent_id"].get<std::string>();
            ev.incumbent_fitness = e.at("incumbent_fitness").get<double>();
        }
        events.push_back(std::move(ev));
    }
    archive.restore(std::move(elites), j.at("generation").get<int>(), std::move(events));
    return archive;
}

} // namespace cuecraft

#pragma once

#include "cuecraft/context.hpp"

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cuecraft {

struct NicheIndex {
    int i = 0;
    int j = 0;
    int k = 0;

    auto operator<=>(const NicheIndex&) const = default;
};

/// Per component: min(floor(value * bins), bins - 1). Throws DomainError if bins < 1.
NicheIndex niche_index(const BehaviorDescriptor& descriptor, int bins);
/// Descriptor at the centre of a cell.
BehaviorDescriptor niche_center(const NicheIndex& niche, int bins);

enum class InsertOutcome { InsertedEmpty, Replaced, RejectedLower, RejectedTie };
std::string_view to_string(InsertOutcome outcome);

struct ArchiveEvent {
    int generation = 0;
    std::string context_id;
    NicheIndex niche;
    InsertOutcome outcome = InsertOutcome::InsertedEmpty;
    double fitness = 0.0;
    std::optional<std::string> incumbent_id;
    std::optional<double> incumbent_fitness;
};

/// Grid archive holding at most one elite per niche. A niche's elite is only
/// replaced by a strictly fitter context.
class EliteArchive {
public:
    explicit EliteArchive(int bins = 3);

    /// Places the candidate by its descriptor. Throws DomainError when the
    /// candidate lacks a descriptor or fitness.
    InsertOutcome try_insert(const Context& candidate);

    int bins() const noexcept { return bins_; }
    int generation() const noexcept { return generation_; }
    void advance_generation() { ++generation_; }

    const std::map<NicheIndex, Context>& cells() const noexcept { return cells_; }
    const Context* elite(const NicheIndex& niche) const;
    const Context* find(std::string_view context_id) const;
    std::size_t occupied() const noexcept { return cells_.size(); }
    std::vector<NicheIndex> empty_niches() const;
    /// Elites in niche order.
    std::vector<const Context*> elites() const;
    const std::vector<ArchiveEvent>& events() const noexcept { return events_; }

    /// Rebuilds a persisted archive. Throws ConfigError when two elites share a niche.
    void restore(std::vector<Context> elites, int generation, std::vector<ArchiveEvent> events);

private:
    int bins_;
    int generation_ = 0;
    std::map<NicheIndex, Context> cells_;
    std::vector<ArchiveEvent> events_;
};

nlohmann::json to_json(const NicheIndex& n);
nlohmann::json to_json(const EliteArchive& archive);
EliteArchive archive_from_json(const nlohmann::json& j);

} // namespace cuecraft

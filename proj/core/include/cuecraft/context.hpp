#pragma once

#include "cuecraft/planner.hpp"

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cuecraft {

/// Position of a context in the behavior space; every component lies in [0, 1].
struct BehaviorDescriptor {
    double phi1 = 0.0; ///< proximity scope
    double phi2 = 0.0; ///< knowledge density
    double phi3 = 0.0; ///< viewpoint diversity

    bool operator==(const BehaviorDescriptor&) const = default;
};

enum class Provenance { Seed, Mutant };

enum class MutationOperator { Insertion, Deletion, Replacement };

std::string_view to_string(Provenance p);
std::string_view to_string(MutationOperator op);
/// Throws ConfigError for unknown names.
MutationOperator parse_operator(std::string_view name);

struct Context {
    std::string context_id;
    std::string text;
    Outline outline;
    Provenance provenance = Provenance::Seed;
    std::optional<BehaviorDescriptor> descriptor;
    std::optional<double> fitness;
    /// Ancestor ids, nearest parent first. Empty for seeds.
    std::vector<std::string> lineage;
    std::optional<MutationOperator> op;

    std::optional<std::string> parent_id() const {
        return lineage.empty() ? std::nullopt : std::optional<std::string>(lineage.front());
    }
};

nlohmann::json to_json(const BehaviorDescriptor& d);
BehaviorDescriptor descriptor_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Context& c);
Context context_from_json(const nlohmann::json& j);

} // namespace cuecraft

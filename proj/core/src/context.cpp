#include "cuecraft/context.hpp"

namespace cuecraft {

std::string_view to_string(Provenance p) { return p == Provenance::Seed ? "Seed" : "Mutant"; }

std::string_view to_string(MutationOperator op) {
    switch (op) {
    case MutationOperator::Insertion: return "Insertion";
    case MutationOperator::Deletion: return "Deletion";
    case MutationOperator::Replacement: return "Replacement";
    }
    return "Insertion";
}

MutationOperator parse_operator(std::string_view name) {
    for (auto op : {MutationOperator::Insertion, MutationOperator::Deletion, MutationOperator::Replacement}) {
        if (to_string(op) == name) {
            return op;
        }
    }
    throw ConfigError("unknown mutation operator '" + std::string(name) + "'");
}

nlohmann::json to_json(const BehaviorDescriptor& d) { return nlohmann::json::array({d.phi1, d.phi2, d.phi3}); }

BehaviorDescriptor descriptor_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 3) {
        throw ConfigError("behavior descriptor must be an array of three numbers");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

nlohmann::json to_json(const Context& c) {
    nlohmann::json j{{"context_id", c.context_id},
                     {"text", c.text},
                     {"outline", to_json(c.outline)},
                     {"provenance", to_string(c.provenance)},
                     {"lineage", c.lineage}};
    j["descriptor"] = c.descriptor ? to_json(*c.descriptor) : nlohmann::json(nullptr);
    j["fitness"] = c.fitness ? nlohmann::json(*c.fitness) : nlohmann::json(nullptr);
    j["operator"] = c.op ? nlohmann::json(to_string(*c.op)) : nlohmann::json(nullptr);
    return j;
}

Context context_from_json(const nlohmann::json& j) {
    Context c;
    c.context_id = j.at("context_id").get<std::string>();
    c.text = j.at("text").get<std::string>();
    if (j.contains("outline") && j["outline"].is_object()) {
        c.outline = outline_from_json(j["outline"]);
    }
    c.provenance = j.value("provenance", std::string("Seed")) == "Mutant" ? Provenance::Mutant : Provenance::Seed;
    c.lineage = j.value("lineage", std::vector<std::string>{});
    if (j.contains("descriptor") && !j["descriptor"].is_null()) {
        c.descriptor = descriptor_from_json(j["descriptor"]);
    }
    if (j.contains("fitness") && !j["fitness"].is_null()) {
        c.fitness = j["fitness"].get<double>();
    }
    if (j.contains("operator") && !j["operator"].is_null()) {
        c.op = parse_operator(j["operator"].get<std::string>());
    }
    return c;
}

} // namespace cuecraft

#pragma once

#include "cuecraft/oracle.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace cuecraft {

struct Query {
    std::string title;
    std::string theme;

    /// Throws DomainError when either field is blank.
    void validate() const;
};

enum class ExpansionKind { FixedChildren, SingleChoice, MultiChoice, GeneratedPhrase };

/// A candidate in a choice pool. `option` is what the model picks; `label` is the
/// node label the pick is instantiated as.
struct PoolOption {
    std::string option;
    std::string label;
};

struct ExpansionRule {
    std::string rule_id;
    std::string parent_label;
    ExpansionKind kind = ExpansionKind::FixedChildren;
    std::vector<std::string> children; ///< FixedChildren
    std::vector<PoolOption> pool;      ///< SingleChoice / MultiChoice
    int min_select = 1;
    int max_select = 1;
    int min_words = 6; ///< GeneratedPhrase
    int max_words = 8;

    const PoolOption* find_option(std::string_view name) const;
};

class RuleLibrary {
public:
    RuleLibrary() = default;
    /// Validates every rule; throws RuleParseError naming the offending rule/field.
    explicit RuleLibrary(std::vector<ExpansionRule> rules);

    /// Parses the JSON rule schema. Diagnostics carry the JSON line/column for
    /// syntax errors and a `rules[i].field` path for schema errors.
    static RuleLibrary parse(std::string_view json_text);
    static RuleLibrary load(const std::filesystem::path& path);

    const std::vector<ExpansionRule>& rules() const noexcept { return rules_; }
    std::vector<const ExpansionRule*> rules_for(std::string_view label) const;
    const ExpansionRule* find(std::string_view rule_id) const;
    std::size_t size() const noexcept { return rules_.size(); }

private:
    std::vector<ExpansionRule> rules_;
};

/// Loads the rule library bundled under the data directory.
RuleLibrary load_rule_library(const std::filesystem::path& path);

using HyperNodeId = std::uint32_t;

/// One hyperedge: a parent connected to a group of children by a single rule.
struct HyperEdge {
    std::string rule_id;
    std::vector<HyperNodeId> children;
};

struct HyperNode {
    HyperNodeId id = 0;
    std::string label;
    std::optional<std::string> payload;
    bool divisible = false;
    std::optional<HyperNodeId> parent;
    std::vector<HyperEdge> child_groups;
};

/// A complete candidate outline: starting at the root, one child group is chosen
/// at every expanded node. `node_path` lists the chain's nodes in pre-order, so
/// every entry's parent precedes it. `chain_id` encodes the group choices made at
/// branching nodes ("L" when the tree never branches), which gives a stable
/// lexicographic tie-break.
struct HyperChain {
    std::string chain_id;
    std::vector<HyperNodeId> node_path;
    std::optional<double> score;
};

struct OutlineSection {
    std::string label;
    std::string payload;
    /// Labels from the root down to (excluding) this leaf.
    std::vector<std::string> path;

    /// The top-level narrative aspect this section belongs to (path[1]), or the
    /// label itself for depth-1 leaves.
    std::string aspect() const;
};

struct Outline {
    std::vector<OutlineSection> sections;
    std::string source_chain;

    /// Human-readable list used to condition prompts.
    std::string render() const;
};

nlohmann::json to_json(const Outline& outline);
Outline outline_from_json(const nlohmann::json& j);

class HyperTree {
public:
    HyperTree() = default;
    HyperTree(std::string root_label, const RuleLibrary& rules);

    HyperNodeId root() const noexcept { return 0; }
    const HyperNode& node(HyperNodeId id) const { return nodes_.at(id); }
    const std::vector<HyperNode>& nodes() const noexcept { return nodes_; }
    std::size_t size() const noexcept { return nodes_.size(); }

    /// Appends a hyperedge under `parent`; returns the new child ids. Child
    /// divisibility is derived from `rules`.
    std::vector<HyperNodeId> add_group(HyperNodeId parent, const std::string& rule_id,
                                       const std::vector<std::pair<std::string, std::optional<std::string>>>& children,
                                       const RuleLibrary& rules);
    /// Marks `id` as consumed by expansion.
    void close(HyperNodeId id);

    /// Every candidate hyperchain, in chain_id order. Throws DomainError above
    /// `limit` chains.
    std::vector<HyperChain> chains(std::size_t limit = 4096) const;
    /// Divisible nodes within a chain, in pre-order.
    std::vector<HyperNodeId> divisible_nodes(const HyperChain& chain) const;
    /// Nodes of the chain that have no chosen children, in pre-order.
    std::vector<HyperNodeId> leaves(const HyperChain& chain) const;

    /// Indented label listing of a chain, two spaces per level.
    std::string render(const HyperChain& chain) const;

    nlohmann::json to_json() const;

private:
    std::vector<HyperNode> nodes_;
};

struct PlannerLimits {
    int max_iterations = 64;
    int beam = 3;
};

/// Chains holding a divisible node are scored (when more than `beam` compete),
/// the best `beam` kept, and each one's most promising divisible node chosen.
/// Throws NoDivisibleNode when nothing is left to expand.
std::vector<std::pair<HyperChain, HyperNodeId>> ht_select(const HyperTree& tree, const Query& query, int beam,
                                                          Oracle& oracle);

/// Applies every rule matching the node's label, appending one hyperedge per
/// rule; returns the new groups as lists of child ids.
std::vector<std::vector<HyperNodeId>> ht_expand(HyperTree& tree, HyperNodeId node, const RuleLibrary& rules,
                                                const Query& query, Oracle& oracle);

/// Grows a tree from "[Plan]" until no divisible node remains or the iteration
/// limit is reached.
HyperTree ht_construct(const Query& query, const RuleLibrary& rules, const PlannerLimits& limits, Oracle& oracle);

/// Scores the candidate chains and flattens the best one into an outline.
/// Chains without divisible nodes are preferred when any exist.
Outline ht_decide(const HyperTree& tree, const Query& query, Oracle& oracle, HyperChain* decided = nullptr);

/// The label every tree is rooted at.
inline constexpr const char* kPlanRoot = "[Plan]";

} // namespace cuecraft

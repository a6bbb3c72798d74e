#pragma once

#include "cuecraft/context.hpp"
#include "cuecraft/oracle.hpp"
#include "cuecraft/planner.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cuecraft {

/// Weights of the immediate fragment value and the look-ahead threshold.
struct EvaluationWeights {
    double w_sc = 0.4;
    double w_im = 0.3;
    double w_co = 0.3;
    double tau = 0.5;

    /// Throws DomainError unless weights are non-negative, sum to 1 and tau is in [0, 1].
    void validate() const;
    /// Preset weight groups 1, 2 and 3 with the default tau.
    static EvaluationWeights group(int n);
};

using SearchNodeId = std::uint32_t;

struct SearchNode {
    SearchNodeId node_id = 0;
    std::string fragment;
    std::int64_t visit_count = 0;
    double value = 0.0;
    std::optional<SearchNodeId> parent;
    std::vector<SearchNodeId> children;
    int depth = 0;
    /// Reward from this node's own evaluation, reused when it is revisited as a terminal.
    std::optional<double> reward;
    /// Expansion produced nothing; treated as terminal.
    bool exhausted = false;
};

class SearchTree {
public:
    SearchTree();

    SearchNodeId root() const noexcept { return 0; }
    const SearchNode& node(SearchNodeId id) const { return nodes_.at(id); }
    SearchNode& node(SearchNodeId id) { return nodes_.at(id); }
    const std::vector<SearchNode>& nodes() const noexcept { return nodes_; }
    std::size_t size() const noexcept { return nodes_.size(); }

    SearchNodeId add_child(SearchNodeId parent, std::string fragment);
    /// Fragments from the root's first child down to `id`.
    std::vector<std::string> path_fragments(SearchNodeId id) const;
    /// Node ids from the root down to `id`, inclusive.
    std::vector<SearchNodeId> path(SearchNodeId id) const;

private:
    std::vector<SearchNode> nodes_;
};

/// V + c * sqrt(ln(parent_visits) / N). Throws DomainError if parent_visits < 1
/// or the node is unvisited.
double uct_score(const SearchNode& node, std::int64_t parent_visits, double c);

/// Descends from the root. Unvisited children are taken first (lowest id), then
/// the highest UCT child, ties to the lowest id. Stops at a node without children.
SearchNodeId select(const SearchTree& tree, double c);

/// (w_sc*s_sc + w_im*s_im + w_co*s_co) * (1 - s_ha).
double aggregate_immediate(const FragmentScores& scores, const EvaluationWeights& weights);

/// Applies the running-mean update to `leaf` and every ancestor.
void backpropagate(SearchTree& tree, SearchNodeId leaf, double reward);

/// Greedy descent over visited children by value, then visit count, then lower
/// id. Returns the path without the root. Throws EmptyTree.
std::vector<SearchNodeId> extract_best(const SearchTree& tree);

/// One top-level aspect of the outline and the leaf sections under it. The
/// generator grows one tree per aspect.
struct SectionPlan {
    std::string aspect;
    std::vector<OutlineSection> items;

    std::string describe() const;
};

/// Groups consecutive outline sections by aspect, keeping outline order.
std::vector<SectionPlan> plan_sections(const Outline& outline);

struct MctsBudget {
    int simulations = 24;
    int u = 3;
    int depth_cap = 6;
    double c = 1.414;
    EvaluationWeights weights;
    int lookahead_len = 2;
    /// Sampling temperature for sentence candidates.
    double temperature = 0.8;
    std::optional<std::int64_t> seed;

    void validate() const;
};

/// Prompt inputs shared by every request of one section search.
struct SearchPrompt {
    Query query;
    std::string outline;  ///< rendered outline
    std::string section;  ///< SectionPlan::describe()
    std::string history;  ///< text extracted for earlier sections
};

struct Evaluation {
    double reward = 0.0;
    double immediate = 0.0;
    bool lookahead = false;
};

/// Issues `u` Generate requests for the sentence following `node`, keeps the
/// first sentence of each reply, drops duplicates and appends them as children.
/// Throws EmptyGeneration when every reply is empty.
std::vector<SearchNodeId> expand(SearchTree& tree, SearchNodeId node, const SearchPrompt& prompt,
                                 const MctsBudget& budget, Oracle& oracle);

/// Immediate value of the node's fragment, refined by a short look-ahead when it
/// falls below tau. The continuation is discarded.
Evaluation evaluate(const SearchTree& tree, SearchNodeId node, const SearchPrompt& prompt,
                    const MctsBudget& budget, Oracle& oracle);

struct TraceEntry {
    int simulation = 0;
    std::vector<SearchNodeId> path;
    double reward = 0.0;
    bool lookahead = false;
};

struct SectionSearch {
    std::string aspect;
    SearchTree tree;
    std::vector<TraceEntry> trace;
    std::vector<std::string> sentences;
};

/// Runs `budget.simulations` iterations on a fresh tree and extracts the best path.
SectionSearch search_section(const SearchPrompt& prompt, const MctsBudget& budget, Oracle& oracle);

nlohmann::json to_json(const SectionSearch& search);

/// Fills every aspect of the outline in order, threading earlier text into later
/// prompts. Sections become paragraphs of the returned Seed context.
Context generate_seed(const Query& query, const Outline& outline, const MctsBudget& budget, Oracle& oracle,
                      std::string context_id = "seed", std::vector<SectionSearch>* searches = nullptr);

} // namespace cuecraft

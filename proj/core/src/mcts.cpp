#include "cuecraft/mcts.hpp"

#include "cuecraft/text.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace cuecraft {
namespace {

constexpr const char* kEmptyHistory = "(start of scenario)";

std::string history_at(const SearchTree& tree, SearchNodeId id, const std::string& prior) {
    const std::string own = join(tree.path_fragments(id), " ");
    if (prior.empty()) {
        return own;
    }
    return own.empty() ? prior : prior + "\n\n" + own;
}

} // namespace

void EvaluationWeights::validate() const {
    if (w_sc < 0 || w_im < 0 || w_co < 0) {
        throw DomainError("evaluation weights must be non-negative");
    }
    if (std::abs(w_sc + w_im + w_co - 1.0) > 1e-9) {
        throw DomainError("evaluation weights must sum to 1");
    }
    if (tau < 0 || tau > 1) {
        throw DomainError("tau must lie in [0,1]");
    }
}

EvaluationWeights EvaluationWeights::group(int n) {
    switch (n) {
    case 1: return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.5};
    case 2: return {0.4, 0.3, 0.3, 0.5};
    case 3: return {0.5, 0.25, 0.25, 0.5};
    default: throw ConfigError("unknown weight group " + std::to_string(n) + " (1, 2 or 3)");
    }
}

SearchTree::SearchTree() { nodes_.push_back(SearchNode{}); }

SearchNodeId SearchTree::add_child(SearchNodeId parent, std::string fragment) {
    SearchNode n;
    n.node_id = static_cast<SearchNodeId>(nodes_.size());
    n.fragment = std::move(fragment);
    n.parent = parent;
    n.depth = nodes_.at(parent).depth + 1;
    nodes_.push_back(std::move(n));
    nodes_[parent].children.push_back(nodes_.back().node_id);
    return nodes_.back().node_id;
}

std::vector<SearchNodeId> SearchTree::path(SearchNodeId id) const {
    std::vector<SearchNodeId> out;
    for (std::optional<SearchNodeId> cur = id; cur; cur = nodes_.at(*cur).parent) {
        out.push_back(*cur);
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::vector<std::string> SearchTree::path_fragments(SearchNodeId id) const {
    std::vector<std::string> out;
    for (SearchNodeId n : path(id)) {
        if (n != root()) {
            out.push_back(nodes_.at(n).fragment);
        }
    }
    return out;
}

double uct_score(const SearchNode& node, std::int64_t parent_visits, double c) {
    if (parent_visits < 1) {
        throw DomainError("UCT needs a visited parent");
    }
    if (node.visit_count < 1) {
        throw DomainError("UCT is undefined for an unvisited node");
    }
    return node.value + c * std::sqrt(std::log(static_cast<double>(parent_visits)) /
                                      static_cast<double>(node.visit_count));
}

SearchNodeId select(const SearchTree& tree, double c) {
    SearchNodeId cur = tree.root();
    while (!tree.node(cur).children.empty()) {
        const SearchNode& n = tree.node(cur);
        std::optional<SearchNodeId> best;
        double best_score = 0.0;
        for (SearchNodeId child : n.children) {
            const SearchNode& ch = tree.node(child);
            if (ch.visit_count == 0) {
                best = child;
                break;
            }
            const double s = uct_score(ch, std::max<std::int64_t>(n.visit_count, 1), c);
            if (!best || s > best_score) {
                best = child;
                best_score = s;
            }
        }
        cur = *best;
    }
    return cur;
}

double aggregate_immediate(const FragmentScores& s, const EvaluationWeights& w) {
    return (w.w_sc * s.s_sc + w.w_im * s.s_im + w.w_co * s.s_co) * (1.0 - s.s_ha);
}

void backpropagate(SearchTree& tree, SearchNodeId leaf, double reward) {
    for (std::optional<SearchNodeId> cur = leaf; cur; cur = tree.node(*cur).parent) {
        SearchNode& n = tree.node(*cur);
        const double old_n = static_cast<double>(n.visit_count);
        n.visit_count += 1;
        n.value = (n.value * old_n + reward) / static_cast<double>(n.visit_count);
    }
}

std::vector<SearchNodeId> extract_best(const SearchTree& tree) {
    if (tree.node(tree.root()).children.empty()) {
        throw EmptyTree("search tree has no children below the root");
    }
    std::vector<SearchNodeId> path;
    SearchNodeId cur = tree.root();
    for (;;) {
        std::optional<SearchNodeId> best;
        for (SearchNodeId child : tree.node(cur).children) {
            const SearchNode& ch = tree.node(child);
            if (ch.visit_count == 0) {
                continue;
            }
            if (!best) {
                best = child;
                continue;
            }
            const SearchNode& b = tree.node(*best);
            if (ch.value > b.value || (ch.value == b.value && ch.visit_count > b.visit_count)) {
                best = child;
            }
        }
        if (!best) {
            break;
        }
        path.push_back(*best);
        cur = *best;
    }
    if (path.empty()) {
        throw EmptyTree("no visited child below the root");
    }
    return path;
}

std::string SectionPlan::describe() const {
    std::string out = aspect;
    for (const auto& item : items) {
        out += "\n- " + item.label;
        if (!item.payload.empty() && item.payload != item.label) {
            out += ": " + item.payload;
        }
        if (item.path.size() > 2) {
            out += " (" + item.path.back() + ")";
        }
    }
    return out;
}

std::vector<SectionPlan> plan_sections(const Outline& outline) {
    std::vector<SectionPlan> plans;
    for (const auto& s : outline.sections) {
        const std::string aspect = s.aspect();
        if (plans.empty() || plans.back().aspect != aspect) {
            plans.push_back({aspect, {}});
        }
        plans.back().items.push_back(s);
    }
    return plans;
}

void MctsBudget::validate() const {
    weights.validate();
    if (simulations < 1 || u < 1 || depth_cap < 1 || lookahead_len < 1) {
        throw DomainError("simulations, u, depth_cap and lookahead_len must be at least 1");
    }
    if (c < 0) {
        throw DomainError("exploration constant must be non-negative");
    }
}

std::vector<SearchNodeId> expand(SearchTree& tree, SearchNodeId node, const SearchPrompt& prompt,
                                 const MctsBudget& budget, Oracle& oracle) {
    if (tree.node(node).depth >= budget.depth_cap) {
        throw DomainError("cannot expand a node at the depth cap");
    }
    const std::string history = history_at(tree, node, prompt.history);
    std::set<std::string> seen;
    for (SearchNodeId c : tree.node(node).children) {
        seen.insert(tree.node(c).fragment);
    }
    std::vector<SearchNodeId> added;
    for (int k = 1; k <= budget.u; ++k) {
        OracleRequest req{RequestKind::Generate,
                          "mcts_next_sentence",
                          {{"title", prompt.query.title},
                           {"theme", prompt.query.theme},
                           {"outline", prompt.outline},
                           {"section", prompt.section},
                           {"history", history.empty() ? kEmptyHistory : history},
                           {"candidate", std::to_string(k)}},
                          {budget.temperature, 1, budget.seed}};
        const auto sentences = segment_sentences(oracle.complete(req));
        if (sentences.empty() || !seen.insert(sentences.front()).second) {
            continue;
        }
        added.push_back(tree.add_child(node, sentences.front()));
    }
    if (added.empty() && tree.node(node).children.empty()) {
        throw EmptyGeneration("no usable sentence among " + std::to_string(budget.u) + " candidates");
    }
    return added;
}

Evaluation evaluate(const SearchTree& tree, SearchNodeId node, const SearchPrompt& prompt,
                    const MctsBudget& budget, Oracle& oracle) {
    const SearchNode& n = tree.node(node);
    if (trim(n.fragment).empty()) {
        throw DomainError("cannot evaluate an empty fragment");
    }
    const std::string history = n.parent ? history_at(tree, *n.parent, prompt.history) : prompt.history;
    Evaluation ev;
    ev.immediate = aggregate_immediate(oracle.score_fragment(n.fragment, history, prompt.section), budget.weights);
    ev.reward = ev.immediate;
    if (ev.immediate >= budget.weights.tau) {
        return ev;
    }
    ev.lookahead = true;
    const std::string so_far = history.empty() ? n.fragment : history + " " + n.fragment;
    OracleRequest req{RequestKind::Generate,
                      "mcts_lookahead",
                      {{"title", prompt.query.title},
                       {"theme", prompt.query.theme},
                       {"section", prompt.section},
                       {"history", so_far},
                       {"sentences", std::to_string(budget.lookahead_len)}},
                      {budget.temperature, 1, budget.seed}};
    auto continuation = segment_sentences(oracle.complete(req));
    if (continuation.size() > static_cast<std::size_t>(budget.lookahead_len)) {
        continuation.resize(static_cast<std::size_t>(budget.lookahead_len));
    }
    if (continuation.empty()) {
        return ev;
    }
    const std::string extended = n.fragment + " " + join(continuation, " ");
    ev.reward = std::clamp(
        aggregate_immediate(oracle.score_fragment(extended, history, prompt.section), budget.weights), 0.0, 1.0);
    return ev;
}

SectionSearch search_section(const SearchPrompt& prompt, const MctsBudget& budget, Oracle& oracle) {
    budget.validate();
    SectionSearch out;
    SearchTree& tree = out.tree;
    auto record = [&](int sim, SearchNodeId id, const Evaluation& ev) {
        backpropagate(tree, id, ev.reward);
        out.trace.push_back({sim, tree.path(id), ev.reward, ev.lookahead});
    };
    auto score = [&](int sim, SearchNodeId id) {
        const Evaluation ev = evaluate(tree, id, prompt, budget, oracle);
        tree.node(id).reward = ev.reward;
        record(sim, id, ev);
    };
    for (int sim = 0; sim < budget.simulations; ++sim) {
        const SearchNodeId leaf = select(tree, budget.c);
        SearchNode& n = tree.node(leaf);
        if (leaf != tree.root() && n.visit_count == 0) {
            score(sim, leaf);
            continue;
        }
        if (n.depth < budget.depth_cap && !n.exhausted) {
            std::vector<SearchNodeId> children;
            try {
                children = expand(tree, leaf, prompt, budget, oracle);
            } catch (const EmptyGeneration&) {
                if (leaf == tree.root()) {
                    throw;
                }
                tree.node(leaf).exhausted = true;
            }
            for (SearchNodeId child : children) {
                score(sim, child);
            }
            if (!children.empty()) {
                continue;
            }
        }
        if (leaf == tree.root()) {
            break; // root already expanded and every child exhausted
        }
        const SearchNode& terminal = tree.node(leaf);
        record(sim, leaf, {terminal.reward.value_or(terminal.value), terminal.reward.value_or(terminal.value), false});
    }
    for (SearchNodeId id : extract_best(tree)) {
        out.sentences.push_back(tree.node(id).fragment);
    }
    return out;
}

nlohmann::json to_json(const SectionSearch& search) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : search.tree.nodes()) {
        nodes.push_back({{"id", n.node_id},
                         {"fragment", n.fragment},
                         {"visits", n.visit_count},
                         {"value", n.value},
                         {"depth", n.depth},
                         {"parent", n.parent ? nlohmann::json(*n.parent) : nlohmann::json(nullptr)},
                         {"children", n.children}});
    }
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& t : search.trace) {
        trace.push_back({{"simulation", t.simulation}, {"path", t.path}, {"reward", t.reward}, {"lookahead", t.lookahead}});
    }
    return {{"aspect", search.aspect}, {"sentences", search.sentences}, {"nodes", nodes}, {"trace", trace}};
}

Context generate_seed(const Query& query, const Outline& outline, const MctsBudget& budget, Oracle& oracle,
                      std::string context_id, std::vector<SectionSearch>* searches) {
    query.validate();
    budget.validate();
    const auto plans = plan_sections(outline);
    if (plans.empty()) {
        throw DomainError("outline has no sections");
    }
    const std::string rendered = outline.render();
    std::vector<std::string> paragraphs;
    for (const auto& plan : plans) {
        SearchPrompt prompt{query, rendered, plan.describe(), join(paragraphs, "\n\n")};
        SectionSearch s = search_section(prompt, budget, oracle);
        s.aspect = plan.aspect;
        if (s.sentences.empty()) {
            throw EmptyGeneration("section " + plan.aspect + " produced no text");
        }
        paragraphs.push_back(join(s.sentences, " "));
        if (searches != nullptr) {
            searches->push_back(std::move(s));
        }
    }
    Context ctx;
    ctx.context_id = std::move(context_id);
    ctx.text = join(paragraphs, "\n\n");
    ctx.outline = outline;
    ctx.provenance = Provenance::Seed;
    return ctx;
}

} // namespace cuecraft

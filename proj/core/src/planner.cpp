#include "cuecraft/planner.hpp"

#include "cuecraft/text.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace cuecraft {
namespace {

std::string kind_name(ExpansionKind kind) {
    switch (kind) {
    case ExpansionKind::FixedChildren: return "fixed";
    case ExpansionKind::SingleChoice: return "single";
    case ExpansionKind::MultiChoice: return "multi";
    case ExpansionKind::GeneratedPhrase: return "phrase";
    }
    return "fixed";
}

void validate_rule(const ExpansionRule& r) {
    const std::string where = "rule " + r.rule_id + ": ";
    if (r.rule_id.empty()) {
        throw RuleParseError("rule with empty id");
    }
    if (trim(r.parent_label).empty()) {
        throw RuleParseError(where + "empty parent label");
    }
    switch (r.kind) {
    case ExpansionKind::FixedChildren:
        if (r.children.empty()) {
            throw RuleParseError(where + "fixed rule needs at least one child");
        }
        break;
    case ExpansionKind::SingleChoice:
        if (r.pool.size() < 2) {
            throw RuleParseError(where + "single-choice pool needs at least two options");
        }
        break;
    case ExpansionKind::MultiChoice:
        if (r.min_select < 1 || r.min_select > r.max_select ||
            static_cast<std::size_t>(r.max_select) > r.pool.size()) {
            throw RuleParseError(where + "multi-choice needs 1 <= min <= max <= pool size (min=" +
                                 std::to_string(r.min_select) + ", max=" + std::to_string(r.max_select) +
                                 ", pool=" + std::to_string(r.pool.size()) + ")");
        }
        break;
    case ExpansionKind::GeneratedPhrase:
        if (r.min_words < 1 || r.min_words > r.max_words) {
            throw RuleParseError(where + "phrase needs 1 <= min_words <= max_words");
        }
        break;
    }
    std::set<std::string> seen;
    for (const auto& o : r.pool) {
        if (trim(o.option).empty() || !seen.insert(o.option).second) {
            throw RuleParseError(where + "pool options must be non-empty and distinct");
        }
    }
}

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

const nlohmann::json& field(const nlohmann::json& obj, const char* name, const std::string& path) {
    if (!obj.contains(name)) {
        throw RuleParseError(path + "." + name + ": missing");
    }
    return obj.at(name);
}

std::string read_string(const nlohmann::json& obj, const char* name, const std::string& path) {
    const auto& v = field(obj, name, path);
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_number_integer()) {
        return std::to_string(v.get<long long>());
    }
    throw RuleParseError(path + "." + name + ": expected a string");
}

int read_int(const nlohmann::json& obj, const char* name, const std::string& path, int fallback) {
    if (!obj.contains(name)) {
        return fallback;
    }
    const auto& v = obj.at(name);
    if (!v.is_number_integer()) {
        throw RuleParseError(path + "." + name + ": expected an integer");
    }
    return v.get<int>();
}

std::string bracketed(const std::string& s) {
    if (!s.empty() && s.front() == '[' && s.back() == ']') {
        return s;
    }
    return "[" + s + "]";
}

// --- oracle reply parsing -------------------------------------------------

double parse_score_0_100(std::string_view reply) {
    const auto obj = extract_json_object(reply);
    const double v = read_number(obj, "score");
    if (v < 0.0 || v > 100.0) {
        throw ReplyFormatError("\"score\" must lie in [0,100]");
    }
    return v / 100.0;
}

std::size_t parse_choice_index(std::string_view reply, std::size_t n) {
    const auto obj = extract_json_object(reply);
    const double v = read_number(obj, "choice");
    if (v != static_cast<double>(static_cast<long long>(v)) || v < 1.0 || v > static_cast<double>(n)) {
        throw ReplyFormatError("\"choice\" must be an element number from 1 to " + std::to_string(n));
    }
    return static_cast<std::size_t>(v) - 1;
}

std::vector<std::size_t> parse_pool_picks(std::string_view reply, const ExpansionRule& rule) {
    const auto obj = extract_json_object(reply);
    std::vector<std::string> names;
    if (obj.contains("choices") && obj["choices"].is_array()) {
        for (const auto& c : obj["choices"]) {
            if (!c.is_string()) {
                throw ReplyFormatError("\"choices\" must be a list of option strings");
            }
            names.push_back(c.get<std::string>());
        }
    } else if (obj.contains("choice") && obj["choice"].is_string()) {
        names.push_back(obj["choice"].get<std::string>());
    } else {
        throw ReplyFormatError("reply needs a \"choices\" list");
    }
    std::set<std::size_t> picked;
    for (const auto& name : names) {
        const PoolOption* opt = rule.find_option(trim(name));
        if (opt == nullptr) {
            throw ChoiceOutOfPool("option '" + name + "' is not in the pool for " + rule.parent_label);
        }
        picked.insert(static_cast<std::size_t>(opt - rule.pool.data()));
    }
    return {picked.begin(), picked.end()};
}

std::string parse_phrase(std::string_view reply) {
    std::string text = trim(reply);
    if (auto nl = text.find('\n'); nl != std::string::npos) {
        text = trim(text.substr(0, nl));
    }
    while (text.size() >= 2 && (text.front() == '"' || text.front() == '\'') && text.back() == text.front()) {
        text = trim(text.substr(1, text.size() - 2));
    }
    if (text.empty()) {
        throw ReplyFormatError("the phrase is empty");
    }
    return text;
}

std::string list_options(const ExpansionRule& rule) {
    std::string out;
    for (const auto& o : rule.pool) {
        out += "- " + o.option + "\n";
    }
    return trim(out);
}

std::vector<std::size_t> choose_from_pool(const ExpansionRule& rule, const Query& query, Oracle& oracle) {
    const int lo = rule.kind == ExpansionKind::SingleChoice ? 1 : rule.min_select;
    const int hi = rule.kind == ExpansionKind::SingleChoice ? 1 : rule.max_select;
    const std::string count_rule =
        lo == hi ? "exactly " + std::to_string(lo) : "between " + std::to_string(lo) + " and " + std::to_string(hi);
    OracleRequest req{RequestKind::SelectOption,
                      "select_option",
                      {{"title", query.title},
                       {"theme", query.theme},
                       {"node", rule.parent_label},
                       {"options", list_options(rule)},
                       {"count_rule", count_rule}},
                      {}};
    auto parse = [&](std::string_view reply) { return parse_pool_picks(reply, rule); };
    auto in_range = [&](const std::vector<std::size_t>& p) {
        return static_cast<int>(p.size()) >= lo && static_cast<int>(p.size()) <= hi;
    };
    auto picks = oracle.complete_structured(req, parse);
    if (!in_range(picks)) {
        req.variables[kRepairVariable] = "you chose " + std::to_string(picks.size()) + " options; choose " + count_rule;
        picks = oracle.complete_structured(req, parse);
    }
    // Deterministic clamp: keep the first picks in pool order, fill from the pool head.
    if (static_cast<int>(picks.size()) > hi) {
        picks.resize(static_cast<std::size_t>(hi));
    }
    for (std::size_t i = 0; static_cast<int>(picks.size()) < lo && i < rule.pool.size(); ++i) {
        if (std::find(picks.begin(), picks.end(), i) == picks.end()) {
            picks.push_back(i);
        }
    }
    std::sort(picks.begin(), picks.end());
    return picks;
}

} // namespace

void Query::validate() const {
    if (trim(title).empty() || trim(theme).empty()) {
        throw DomainError("query needs a non-empty title and theme");
    }
}

const PoolOption* ExpansionRule::find_option(std::string_view name) const {
    for (const auto& o : pool) {
        if (o.option == name || o.label == name || bracketed(o.option) == name ||
            (o.label.size() > 2 && o.label.substr(1, o.label.size() - 2) == name)) {
            return &o;
        }
    }
    return nullptr;
}

RuleLibrary::RuleLibrary(std::vector<ExpansionRule> rules) : rules_(std::move(rules)) {
    if (rules_.empty()) {
        throw RuleParseError("rule library is empty");
    }
    std::set<std::string> ids;
    for (const auto& r : rules_) {
        validate_rule(r);
        if (!ids.insert(r.rule_id).second) {
            throw RuleParseError("duplicate rule id " + r.rule_id);
        }
    }
}

RuleLibrary RuleLibrary::parse(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        const auto [line, col] = line_col(json_text, e.byte == 0 ? 0 : e.byte - 1);
        throw RuleParseError("rule file is not valid JSON at line " + std::to_string(line) + ", column " +
                             std::to_string(col));
    }
    if (!doc.is_object()) {
        throw RuleParseError("rule file must be a JSON object");
    }
    const auto& list = field(doc, "rules", "$");
    if (!list.is_array()) {
        throw RuleParseError("$.rules: expected an array");
    }
    std::vector<ExpansionRule> rules;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string path = "rules[" + std::to_string(i) + "]";
        const auto& e = list[i];
        if (!e.is_object()) {
            throw RuleParseError(path + ": expected an object");
        }
        ExpansionRule r;
        r.rule_id = read_string(e, "id", path);
        r.parent_label = read_string(e, "parent", path);
        const std::string kind = read_string(e, "kind", path);
        if (kind == "fixed") {
            r.kind = ExpansionKind::FixedChildren;
            const auto& children = field(e, "children", path);
            if (!children.is_array()) {
                throw RuleParseError(path + ".children: expected an array");
            }
            for (const auto& c : children) {
                if (!c.is_string()) {
                    throw RuleParseError(path + ".children: expected strings");
                }
                r.children.push_back(c.get<std::string>());
            }
        } else if (kind == "single" || kind == "multi") {
            r.kind = kind == "single" ? ExpansionKind::SingleChoice : ExpansionKind::MultiChoice;
            const auto& pool = field(e, "pool", path);
            if (!pool.is_array()) {
                throw RuleParseError(path + ".pool: expected an array");
            }
            for (const auto& p : pool) {
                if (p.is_string()) {
                    r.pool.push_back({p.get<std::string>(), bracketed(p.get<std::string>())});
                } else if (p.is_object()) {
                    const std::string opt = read_string(p, "option", path + ".pool");
                    std::string label = p.contains("label") ? read_string(p, "label", path + ".pool") : bracketed(opt);
                    r.pool.push_back({opt, std::move(label)});
                } else {
                    throw RuleParseError(path + ".pool: entries must be strings or {option, label} objects");
                }
            }
            if (r.kind == ExpansionKind::MultiChoice) {
                r.min_select = read_int(e, "min", path, 1);
                r.max_select = read_int(e, "max", path, r.min_select);
            }
        } else if (kind == "phrase") {
            r.kind = ExpansionKind::GeneratedPhrase;
            r.min_words = read_int(e, "min_words", path, 6);
            r.max_words = read_int(e, "max_words", path, 8);
        } else {
            throw RuleParseError(path + ".kind: unknown kind '" + kind + "' (fixed|single|multi|phrase)");
        }
        try {
            validate_rule(r);
        } catch (const RuleParseError& err) {
            throw RuleParseError(path + ": " + err.what());
        }
        rules.push_back(std::move(r));
    }
    return RuleLibrary(std::move(rules));
}

RuleLibrary RuleLibrary::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw RuleParseError("cannot open rule file " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse(ss.str());
    } catch (const RuleParseError& e) {
        throw RuleParseError(path.string() + ": " + e.what());
    }
}

RuleLibrary load_rule_library(const std::filesystem::path& path) { return RuleLibrary::load(path); }

std::vector<const ExpansionRule*> RuleLibrary::rules_for(std::string_view label) const {
    std::vector<const ExpansionRule*> out;
    for (const auto& r : rules_) {
        if (r.parent_label == label) {
            out.push_back(&r);
        }
    }
    return out;
}

const ExpansionRule* RuleLibrary::find(std::string_view rule_id) const {
    for (const auto& r : rules_) {
        if (r.rule_id == rule_id) {
            return &r;
        }
    }
    return nullptr;
}

std::string OutlineSection::aspect() const { return path.size() >= 2 ? path[1] : label; }

std::string Outline::render() const {
    std::string out;
    for (const auto& s : sections) {
        std::vector<std::string> parts(s.path.size() > 1 ? s.path.begin() + 1 : s.path.end(), s.path.end());
        parts.push_back(s.label);
        out += "- " + join(parts, " > ");
        if (!s.payload.empty() && s.payload != s.label) {
            out += ": " + s.payload;
        }
        out += "\n";
    }
    return trim(out);
}

nlohmann::json to_json(const Outline& outline) {
    nlohmann::json sections = nlohmann::json::array();
    for (const auto& s : outline.sections) {
        sections.push_back({{"label", s.label}, {"payload", s.payload}, {"path", s.path}});
    }
    return {{"source_chain", outline.source_chain}, {"sections", std::move(sections)}};
}

Outline outline_from_json(const nlohmann::json& j) {
    Outline o;
    o.source_chain = j.at("source_chain").get<std::string>();
    for (const auto& s : j.at("sections")) {
        o.sections.push_back({s.at("label").get<std::string>(), s.value("payload", std::string()),
                              s.value("path", std::vector<std::string>{})});
    }
    return o;
}

HyperTree::HyperTree(std::string root_label, const RuleLibrary& rules) {
    HyperNode root;
    root.id = 0;
    root.divisible = !rules.rules_for(root_label).empty();
    root.label = std::move(root_label);
    nodes_.push_back(std::move(root));
}

std::vector<HyperNodeId> HyperTree::add_group(
    HyperNodeId parent, const std::string& rule_id,
    const std::vector<std::pair<std::string, std::optional<std::string>>>& children, const RuleLibrary& rules) {
    HyperEdge edge{rule_id, {}};
    for (const auto& [label, payload] : children) {
        HyperNode n;
        n.id = static_cast<HyperNodeId>(nodes_.size());
        n.label = label;
        n.payload = payload;
        n.parent = parent;
        n.divisible = !rules.rules_for(label).empty();
        edge.children.push_back(n.id);
        nodes_.push_back(std::move(n));
    }
    std::vector<HyperNodeId> ids = edge.children;
    nodes_.at(parent).child_groups.push_back(std::move(edge));
    return ids;
}

void HyperTree::close(HyperNodeId id) { nodes_.at(id).divisible = false; }

std::vector<HyperChain> HyperTree::chains(std::size_t limit) const {
    struct Partial {
        std::vector<std::size_t> choices;
        std::vector<HyperNodeId> nodes;
    };
    // Recursive enumeration of group choices below a node.
    auto enumerate = [&](auto&& self, HyperNodeId id) -> std::vector<Partial> {
        const HyperNode& n = nodes_.at(id);
        if (n.child_groups.empty()) {
            return {Partial{{}, {id}}};
        }
        std::vector<Partial> out;
        for (std::size_t g = 0; g < n.child_groups.size(); ++g) {
            std::vector<Partial> acc{Partial{{}, {id}}};
            if (n.child_groups.size() > 1) {
                acc.front().choices.push_back(g);
            }
            for (HyperNodeId child : n.child_groups[g].children) {
                const auto sub = self(self, child);
                std::vector<Partial> next;
                for (const auto& a : acc) {
                    for (const auto& s : sub) {
                        Partial p = a;
                        p.choices.insert(p.choices.end(), s.choices.begin(), s.choices.end());
                        p.nodes.insert(p.nodes.end(), s.nodes.begin(), s.nodes.end());
                        next.push_back(std::move(p));
                        if (next.size() > limit) {
                            throw DomainError("hypertree holds more than " + std::to_string(limit) + " chains");
                        }
                    }
                }
                acc = std::move(next);
            }
            for (auto& a : acc) {
                out.push_back(std::move(a));
            }
        }
        return out;
    };
    std::vector<HyperChain> chains;
    if (nodes_.empty()) {
        return chains;
    }
    for (auto& p : enumerate(enumerate, root())) {
        std::string id = "L";
        for (std::size_t i = 0; i < p.choices.size(); ++i) {
            id += (i == 0 ? "" : ".") + std::to_string(p.choices[i]);
        }
        chains.push_back({std::move(id), std::move(p.nodes), std::nullopt});
    }
    std::sort(chains.begin(), chains.end(),
              [](const HyperChain& a, const HyperChain& b) { return a.chain_id < b.chain_id; });
    return chains;
}

std::vector<HyperNodeId> HyperTree::divisible_nodes(const HyperChain& chain) const {
    std::vector<HyperNodeId> out;
    for (HyperNodeId id : chain.node_path) {
        if (nodes_.at(id).divisible) {
            out.push_back(id);
        }
    }
    return out;
}

std::vector<HyperNodeId> HyperTree::leaves(const HyperChain& chain) const {
    std::vector<HyperNodeId> out;
    for (HyperNodeId id : chain.node_path) {
        if (nodes_.at(id).child_groups.empty()) {
            out.push_back(id);
        }
    }
    return out;
}

std::string HyperTree::render(const HyperChain& chain) const {
    std::string out;
    for (HyperNodeId id : chain.node_path) {
        std::size_t depth = 0;
        for (auto p = nodes_.at(id).parent; p; p = nodes_.at(*p).parent) {
            ++depth;
        }
        out += std::string(depth * 2, ' ') + nodes_.at(id).label + "\n";
    }
    return out;
}

nlohmann::json HyperTree::to_json() const {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : nodes_) {
        nlohmann::json groups = nlohmann::json::array();
        for (const auto& g : n.child_groups) {
            groups.push_back({{"rule", g.rule_id}, {"children", g.children}});
        }
        nlohmann::json j{{"id", n.id}, {"label", n.label}, {"divisible", n.divisible}, {"groups", groups}};
        j["payload"] = n.payload ? nlohmann::json(*n.payload) : nlohmann::json(nullptr);
        j["parent"] = n.parent ? nlohmann::json(*n.parent) : nlohmann::json(nullptr);
        nodes.push_back(std::move(j));
    }
    return {{"nodes", std::move(nodes)}};
}

std::vector<std::pair<HyperChain, HyperNodeId>> ht_select(const HyperTree& tree, const Query& query, int beam,
                                                          Oracle& oracle) {
    if (beam < 1) {
        throw DomainError("beam must be at least 1");
    }
    std::vector<HyperChain> candidates;
    for (auto& c : tree.chains()) {
        if (!tree.divisible_nodes(c).empty()) {
            candidates.push_back(std::move(c));
        }
    }
    if (candidates.empty()) {
        throw NoDivisibleNode("no hyperchain contains a divisible node");
    }
    if (candidates.size() > static_cast<std::size_t>(beam)) {
        for (auto& c : candidates) {
            OracleRequest req{RequestKind::SelectOption,
                              "select_chain",
                              {{"title", query.title}, {"theme", query.theme}, {"chain", tree.render(c)}},
                              {}};
            c.score = oracle.complete_structured(std::move(req), parse_score_0_100);
        }
        std::stable_sort(candidates.begin(), candidates.end(), [](const HyperChain& a, const HyperChain& b) {
            if (*a.score != *b.score) {
                return *a.score > *b.score;
            }
            return a.chain_id < b.chain_id;
        });
        candidates.resize(static_cast<std::size_t>(beam));
    }
    std::vector<std::pair<HyperChain, HyperNodeId>> selected;
    for (auto& c : candidates) {
        const auto divisible = tree.divisible_nodes(c);
        HyperNodeId pick = divisible.front();
        if (divisible.size() > 1) {
            std::string options;
            for (std::size_t i = 0; i < divisible.size(); ++i) {
                const auto& n = tree.node(divisible[i]);
                options += std::to_string(i + 1) + ". " + n.label;
                if (n.parent) {
                    options += " (under " + tree.node(*n.parent).label + ")";
                }
                options += "\n";
            }
            OracleRequest req{RequestKind::SelectOption,
                              "select_leaf",
                              {{"title", query.title},
                               {"theme", query.theme},
                               {"chain", tree.render(c)},
                               {"options", trim(options)}},
                              {}};
            const std::size_t n = divisible.size();
            pick = divisible[oracle.complete_structured(
                std::move(req), [n](std::string_view reply) { return parse_choice_index(reply, n); })];
        }
        selected.emplace_back(std::move(c), pick);
    }
    return selected;
}

std::vector<std::vector<HyperNodeId>> ht_expand(HyperTree& tree, HyperNodeId node_id, const RuleLibrary& rules,
                                                const Query& query, Oracle& oracle) {
    const HyperNode& node = tree.node(node_id);
    if (!node.divisible) {
        throw DomainError("node " + node.label + " is not divisible");
    }
    const std::string label = node.label;
    std::vector<std::vector<HyperNodeId>> groups;
    for (const ExpansionRule* rule : rules.rules_for(label)) {
        std::vector<std::pair<std::string, std::optional<std::string>>> children;
        switch (rule->kind) {
        case ExpansionKind::FixedChildren:
            for (const auto& c : rule->children) {
                children.emplace_back(c, std::nullopt);
            }
            break;
        case ExpansionKind::SingleChoice:
        case ExpansionKind::MultiChoice:
            for (std::size_t i : choose_from_pool(*rule, query, oracle)) {
                children.emplace_back(rule->pool[i].label, rule->pool[i].option);
            }
            break;
        case ExpansionKind::GeneratedPhrase: {
            OracleRequest req{RequestKind::Generate,
                              "generate_phrase",
                              {{"title", query.title},
                               {"theme", query.theme},
                               {"node", label},
                               {"min_words", std::to_string(rule->min_words)},
                               {"max_words", std::to_string(rule->max_words)}},
                              {}};
            std::string phrase = oracle.complete_structured(std::move(req), parse_phrase);
            children.emplace_back(phrase, phrase);
            break;
        }
        }
        groups.push_back(tree.add_group(node_id, rule->rule_id, children, rules));
    }
    tree.close(node_id);
    return groups;
}

HyperTree ht_construct(const Query& query, const RuleLibrary& rules, const PlannerLimits& limits, Oracle& oracle) {
    query.validate();
    if (limits.max_iterations < 1) {
        throw DomainError("max_iterations must be at least 1");
    }
    HyperTree tree(kPlanRoot, rules);
    for (int iteration = 0; iteration < limits.max_iterations; ++iteration) {
        std::vector<std::pair<HyperChain, HyperNodeId>> selected;
        try {
            selected = ht_select(tree, query, limits.beam, oracle);
        } catch (const NoDivisibleNode&) {
            break;
        }
        std::set<HyperNodeId> expanded;
        for (const auto& [chain, node] : selected) {
            if (expanded.insert(node).second) {
                ht_expand(tree, node, rules, query, oracle);
            }
        }
    }
    return tree;
}

Outline ht_decide(const HyperTree& tree, const Query& query, Oracle& oracle, HyperChain* decided) {
    auto all = tree.chains();
    std::vector<HyperChain> pool;
    for (const auto& c : all) {
        if (tree.divisible_nodes(c).empty()) {
            pool.push_back(c);
        }
    }
    if (pool.empty()) {
        pool = all;
    }
    if (pool.empty()) {
        throw DomainError("hypertree has no chains");
    }
    std::size_t best = 0;
    if (pool.size() > 1) {
        for (auto& c : pool) {
            OracleRequest req{RequestKind::SelectOption,
                              "decide_chain",
                              {{"title", query.title}, {"theme", query.theme}, {"chain", tree.render(c)}},
                              {}};
            c.score = oracle.complete_structured(std::move(req), parse_score_0_100);
        }
        for (std::size_t i = 1; i < pool.size(); ++i) {
            if (*pool[i].score > *pool[best].score) {
                best = i;
            }
        }
    }
    const HyperChain& chain = pool[best];
    Outline outline;
    outline.source_chain = chain.chain_id;
    for (HyperNodeId id : tree.leaves(chain)) {
        const HyperNode& n = tree.node(id);
        OutlineSection s;
        s.label = n.label;
        s.payload = n.payload.value_or("");
        for (auto p = n.parent; p; p = tree.node(*p).parent) {
            s.path.insert(s.path.begin(), tree.node(*p).label);
        }
        outline.sections.push_back(std::move(s));
    }
    if (decided != nullptr) {
        *decided = chain;
    }
    return outline;
}

} // namespace cuecraft

#include "cuecraft/evaluation.hpp"

#include "cuecraft/text.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cuecraft {
namespace {

void check_aligned(const std::map<std::string, std::string>& a, const std::map<std::string, std::string>& b,
                   const std::string& a_name, const std::string& b_name) {
    std::vector<std::string> missing;
    for (const auto& [id, text] : a) {
        if (!b.count(id)) {
            missing.push_back(id + " (only in " + a_name + ")");
        }
    }
    for (const auto& [id, text] : b) {
        if (!a.count(id)) {
            missing.push_back(id + " (only in " + b_name + ")");
        }
    }
    if (!missing.empty()) {
        throw AlignmentError("query ids are not aligned: " + join(missing, ", "));
    }
}

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        out += c == '\'' ? std::string("'\\''") : std::string(1, c);
    }
    return out + "'";
}

} // namespace

std::map<std::string, std::string> load_context_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw ConfigError("context directory " + dir.string() + " does not exist");
    }
    std::map<std::string, std::string> out;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".txt") {
            continue;
        }
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        out[entry.path().stem().string()] = trim(ss.str());
    }
    return out;
}

std::string method_name(const std::filesystem::path& dir) {
    auto p = dir.lexically_normal();
    if (!p.has_filename()) {
        p = p.parent_path();
    }
    if (p.filename() == "contexts" && p.has_parent_path() && !p.parent_path().filename().empty()) {
        return p.parent_path().filename().string();
    }
    return p.filename().string();
}

std::optional<double> ExternalScorer::score(const std::string& candidate, const std::string& reference) {
    const std::uint64_t key = fnv1a64(reference, fnv1a64(candidate));
    if (auto it = cache_.find(key); it != cache_.end()) {
        return it->second;
    }
    const auto tmp = std::filesystem::temp_directory_path();
    const auto cand_path = tmp / ("cuecraft-cand-" + to_hex(key) + ".txt");
    const auto ref_path = tmp / ("cuecraft-ref-" + to_hex(key) + ".txt");
    std::ofstream(cand_path, std::ios::binary) << candidate;
    std::ofstream(ref_path, std::ios::binary) << reference;
    const std::string cmd = command_ + " " + shell_quote(cand_path.string()) + " " + shell_quote(ref_path.string());
    std::optional<double> result;
    if (FILE* pipe = popen(cmd.c_str(), "r")) {
        std::string output;
        std::array<char, 256> buf{};
        while (fgets(buf.data(), buf.size(), pipe) != nullptr) {
            output += buf.data();
        }
        if (pclose(pipe) == 0) {
            std::istringstream in(output);
            double v = 0;
            if (in >> v) {
                result = v;
            }
        }
    }
    std::filesystem::remove(cand_path);
    std::filesystem::remove(ref_path);
    cache_[key] = result;
    return result;
}

nlohmann::json EvaluationResult::to_json() const {
    nlohmann::json arena_json = nlohmann::json::array();
    for (const auto& r : arena) {
        arena_json.push_back(cuecraft::to_json(r));
    }
    nlohmann::json pairs_json = nlohmann::json::array();
    for (const auto& p : pairs) {
        pairs_json.push_back(cuecraft::to_json(p));
    }
    return {{"arena", arena_json}, {"pairs", pairs_json}, {"text_metrics", text_metrics}};
}

EvaluationResult run_evaluation(const EvaluationOptions& options, Oracle& oracle) {
    if (options.method_dirs.empty()) {
        throw ConfigError("evaluation needs at least one method directory");
    }
    if (!options.metrics.empty() && !options.reference_dir) {
        throw ConfigError("subjective metrics need a reference directory");
    }
    std::optional<std::map<std::string, std::string>> reference;
    if (options.reference_dir) {
        reference = load_context_dir(*options.reference_dir);
    }
    std::optional<std::map<std::string, std::string>> expert;
    if (options.expert_dir) {
        expert = load_context_dir(*options.expert_dir);
    }
    std::optional<ExternalScorer> external;
    if (!options.external_scorer.empty()) {
        external.emplace(options.external_scorer);
    }
    const std::string ref_name = options.reference_dir ? method_name(*options.reference_dir) : "";

    EvaluationResult result;
    for (const auto& dir : options.method_dirs) {
        const std::string method = method_name(dir);
        const auto texts = load_context_dir(dir);
        if (reference && !options.metrics.empty()) {
            check_aligned(texts, *reference, method, ref_name);
            for (const auto& metric : options.metrics) {
                std::vector<PairVerdictSet> sets;
                for (const auto& [qid, text] : texts) {
                    sets.push_back(run_pair({method + "/" + qid, text}, {ref_name + "/" + qid, reference->at(qid)},
                                            metric, oracle));
                }
                MetricReport report;
                try {
                    report = positive_rate(sets, method);
                } catch (const NoValidVerdicts&) {
                    report.metric = metric;
                    report.method = method;
                    report.invalid_pairs = static_cast<std::int64_t>(sets.size());
                }
                report.metric = metric;
                result.arena.push_back(report);
                result.pairs.insert(result.pairs.end(), sets.begin(), sets.end());
            }
        }

        nlohmann::json m = nlohmann::json::object();
        double dv = 0;
        for (const auto& [qid, text] : texts) {
            dv += diverse_verbs(text);
        }
        m["n_contexts"] = texts.size();
        m["diverse_verbs"] = texts.empty() ? 0.0 : dv / static_cast<double>(texts.size());
        if (expert) {
            check_aligned(texts, *expert, method, method_name(*options.expert_dir));
            double r1 = 0, rl = 0, ext = 0;
            std::size_t ext_n = 0;
            for (const auto& [qid, text] : texts) {
                r1 += rouge_1(text, expert->at(qid)).f1;
                rl += rouge_l(text, expert->at(qid)).f1;
                if (external) {
                    if (auto s = external->score(text, expert->at(qid))) {
                        ext += *s;
                        ++ext_n;
                    }
                }
            }
            const double n = static_cast<double>(std::max<std::size_t>(texts.size(), 1));
            m["rouge_1_f1"] = 100.0 * r1 / n;
            m["rouge_l_f1"] = 100.0 * rl / n;
            if (external) {
                m["external_score"] = ext_n == 0 ? nlohmann::json(nullptr) : nlohmann::json(ext / static_cast<double>(ext_n));
            }
        }
        result.text_metrics[method] = m;
    }
    return result;
}

} // namespace cuecraft

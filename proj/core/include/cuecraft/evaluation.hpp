#pragma once

#include "cuecraft/arena.hpp"
#include "cuecraft/metrics.hpp"
#include "cuecraft/oracle.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cuecraft {

/// Reads `<dir>/<query id>.txt` files into a map keyed by query id.
std::map<std::string, std::string> load_context_dir(const std::filesystem::path& dir);

/// Method name of a context directory: its own name, or its parent's when the
/// directory is a run's `contexts/` folder.
std::string method_name(const std::filesystem::path& dir);

/// Runs an external similarity command as `<command> <candidate file> <reference
/// file>` and parses the first number it prints. Results are cached by content.
class ExternalScorer {
public:
    explicit ExternalScorer(std::string command) : command_(std::move(command)) {}
    std::optional<double> score(const std::string& candidate, const std::string& reference);

private:
    std::string command_;
    std::map<std::uint64_t, std::optional<double>> cache_;
};

struct EvaluationOptions {
    std::vector<std::filesystem::path> method_dirs;
    std::optional<std::filesystem::path> reference_dir;
    std::optional<std::filesystem::path> expert_dir;
    std::vector<std::string> metrics;
    std::string external_scorer;
};

struct EvaluationResult {
    std::vector<MetricReport> arena;
    std::vector<PairVerdictSet> pairs;
    nlohmann::json text_metrics = nlohmann::json::object();

    nlohmann::json to_json() const;
};

/// Judges every method against the reference on each metric and computes the
/// text metrics (Diverse Verbs; ROUGE and the external score against experts).
/// Throws AlignmentError when query ids differ between a method and the reference
/// or expert directory.
EvaluationResult run_evaluation(const EvaluationOptions& options, Oracle& oracle);

} // namespace cuecraft

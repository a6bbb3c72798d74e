#pragma once

#include "cuecraft/archive.hpp"
#include "cuecraft/config.hpp"
#include "cuecraft/context.hpp"
#include "cuecraft/evolution.hpp"
#include "cuecraft/mcts.hpp"
#include "cuecraft/planner.hpp"
#include "cuecraft/refiner.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace cuecraft {

/// File layout of one run directory.
struct RunLayout {
    std::filesystem::path root;

    std::filesystem::path outline(const std::string& qid) const { return root / "outline" / (qid + ".json"); }
    std::filesystem::path seed(const std::string& qid) const { return root / "seeds" / (qid + ".json"); }
    std::filesystem::path seed_trace(const std::string& qid) const { return root / "seeds" / (qid + ".trace.json"); }
    std::filesystem::path refine_dir() const { return root / "refine"; }
    std::filesystem::path context(const std::string& qid) const { return root / "contexts" / (qid + ".txt"); }
    std::filesystem::path archive() const { return root / "archive.json"; }
    std::filesystem::path report() const { return root / "report.json"; }
    std::filesystem::path events() const { return root / "events.jsonl"; }
    std::filesystem::path timing() const { return root / "timing.json"; }
};

/// Pretty-printed JSON with sorted keys and a trailing newline.
std::string dump_json(const nlohmann::json& j);
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

struct PlanOutput {
    HyperTree tree;
    Outline outline;
    HyperChain chain;
};

PlanOutput plan_query(const Query& query, const Runtime& rt, Oracle& oracle);

/// Seed context "<qid>-seed" filled by tree search.
Context generate_query_seed(const std::string& qid, const Query& query, const Outline& outline, const Runtime& rt,
                            Oracle& oracle, std::vector<SectionSearch>* searches = nullptr);

/// Baseline seed written by a single chat call, without planning or search.
Context one_shot_seed(const std::string& qid, const Query& query, Oracle& oracle);

/// Seeds an archive with `seed` and evolves it. The RNG seed mixes the run seed
/// with the query id, so re-running from a persisted seed gives the same archive.
EliteArchive evolve_query(const std::string& qid, const Context& seed, const Runtime& rt, Oracle& oracle,
                          std::vector<nlohmann::json>& events);

struct RefineOutcome {
    /// Every report, in the order produced.
    std::vector<EffectivenessReport> reports;
    int bonus_rounds = 0;
};

/// Refines every elite. Elites routed back seed a bonus evolution round, after
/// which elites that have not been refined yet are refined. Repeats for
/// `archive.refine_rounds` rounds at most.
RefineOutcome refine_query(const std::string& qid, EliteArchive& archive, const Runtime& rt, Oracle& oracle,
                           std::vector<nlohmann::json>& events);

/// Fittest elite with a Ready verdict, else the fittest elite overall.
const Context* best_elite(const EliteArchive& archive, const std::vector<EffectivenessReport>& reports);

enum class Stage { Plan, Generate, Evolve, Refine, Pipeline };
std::string_view to_string(Stage stage);

struct StageOptions {
    /// Generate seeds with one chat call instead of planning and search.
    bool one_shot = false;
};

struct QueryRecord {
    std::string query_id;
    Query query;
    bool ok = false;
    std::string error;
    nlohmann::json summary = nlohmann::json::object();
    CallTally tally;
    double elapsed_s = 0.0;
    std::vector<nlohmann::json> events;
    /// Files to persist, relative to the run directory.
    std::vector<std::pair<std::filesystem::path, std::string>> files;
    nlohmann::json archive;
};

struct RunReport {
    std::string run_id;
    Stage stage = Stage::Pipeline;
    BackendKind backend = BackendKind::Mock;
    std::int64_t seed = 0;
    std::vector<QueryRecord> queries;

    std::size_t failed() const;
    /// Elapsed times are only included for the live backend, so mock reports
    /// replay byte for byte.
    nlohmann::json to_json() const;
};

/// Runs one stage (or all of them) for every query. Stages read their inputs from
/// the run directory written by earlier stages. Per-query failures are recorded
/// and skipped; queries run concurrently up to `workers` and every file is
/// written afterwards in query order.
RunReport run_stage(Stage stage, const std::vector<Query>& queries, const Runtime& rt,
                    const std::filesystem::path& out_dir, const StageOptions& options = {});

RunReport run_pipeline(const std::vector<Query>& queries, const Runtime& rt, const std::filesystem::path& out_dir);

} // namespace cuecraft

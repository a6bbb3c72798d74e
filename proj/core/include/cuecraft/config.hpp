#pragma once

#include "cuecraft/backends.hpp"
#include "cuecraft/mcts.hpp"
#include "cuecraft/oracle.hpp"
#include "cuecraft/planner.hpp"
#include "cuecraft/refiner.hpp"
#include "cuecraft/templates.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cuecraft {

enum class BackendKind { Mock, Live };
std::string_view to_string(BackendKind kind);
/// "mock" or "live"; throws ConfigError otherwise.
BackendKind parse_backend_kind(std::string_view name);

struct LiveConfig {
    std::string endpoint = "http://localhost:8000/v1";
    std::string model = "gpt-4o-mini";
    /// Environment variable holding the API key.
    std::string api_key_env = "CUECRAFT_API_KEY";
    int max_in_flight = 4;
    int retries = 3;
    int backoff_ms = 500;
    int timeout_s = 120;
};

struct ArchiveSettings {
    int bins = 3;
    int iterations = 30;
    int mutants_per_iteration = 4;
    /// Generations granted to contexts routed back by the refiner.
    int bonus_iterations = 10;
    /// Bonus evolution rounds per query.
    int refine_rounds = 1;
    double temperature = 0.8;
};

struct RefinerSettings {
    double threshold = 0.6;
    int max_cycles = 3;
    std::vector<std::string> profiles{"Talkative", "Normal", "Quiet"};
};

struct MetricSettings {
    std::vector<std::string> subjective;
    /// Optional external similarity scorer, run as `<command> <candidate> <reference>`
    /// and expected to print one number.
    std::string external_scorer;
};

/// Settings for a run. Relative paths in a config file resolve against the
/// file's directory.
struct RunConfig {
    BackendKind backend = BackendKind::Mock;
    std::filesystem::path mock_script;
    std::filesystem::path templates_dir;
    std::filesystem::path rules;
    std::filesystem::path dataset;
    LiveConfig live;
    PlannerLimits planner;
    MctsBudget mcts;
    ArchiveSettings archive;
    RefinerSettings refiner;
    MetricSettings metrics;
    std::int64_t seed = 7;
    int workers = 1;

    /// Throws ConfigError naming the first out-of-range field.
    void validate() const;
};

/// Defaults pointing at the bundled data directory.
RunConfig default_config();
/// Overlays a JSON document on the defaults. Unknown keys are errors.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);

/// Everything a stage needs to talk to the model: shared templates, backend and
/// rule library. Each query gets its own Oracle so call tallies stay separate.
struct Runtime {
    RunConfig config;
    std::shared_ptr<const TemplateRegistry> templates;
    std::shared_ptr<Backend> backend;
    RuleLibrary rules;

    std::unique_ptr<Oracle> make_oracle() const;
};

/// Loads templates and rules and builds the backend. Reads CUECRAFT_API_KEY (or
/// the configured variable) and CUECRAFT_ENDPOINT for the live backend.
Runtime make_runtime(const RunConfig& config);

} // namespace cuecraft

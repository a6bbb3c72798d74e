#include "cuecraft/config.hpp"

#include "cuecraft/arena.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace cuecraft {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) {
        throw ConfigError(where + " must be an object");
    }
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) {
            throw ConfigError("unknown config key " + where + "." + key);
        }
    }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
    if (!obj.contains(key)) {
        return;
    }
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config key " + where + "." + key + " has the wrong type");
    }
}

void read_path(const json& obj, const char* key, std::filesystem::path& out, const std::filesystem::path& base,
               const std::string& where) {
    std::string s;
    read(obj, key, s, where);
    if (s.empty()) {
        return;
    }
    std::filesystem::path p(s);
    out = p.is_absolute() ? p : (base / p).lexically_normal();
}

EvaluationWeights read_weights(const json& w) {
    if (w.is_string()) {
        const std::string s = w.get<std::string>();
        if (s.size() == 6 && s.rfind("group", 0) == 0) {
            return EvaluationWeights::group(s[5] - '0');
        }
        throw ConfigError("mcts.weights must be group1, group2, group3 or [w_sc, w_im, w_co]");
    }
    if (w.is_array() && w.size() == 3 && w[0].is_number() && w[1].is_number() && w[2].is_number()) {
        return {w[0].get<double>(), w[1].get<double>(), w[2].get<double>(), 0.5};
    }
    throw ConfigError("mcts.weights must be group1, group2, group3 or [w_sc, w_im, w_co]");
}

void require(bool ok, const std::string& message) {
    if (!ok) {
        throw ConfigError(message);
    }
}

} // namespace

std::string_view to_string(BackendKind kind) { return kind == BackendKind::Mock ? "mock" : "live"; }

BackendKind parse_backend_kind(std::string_view name) {
    if (name == "mock") {
        return BackendKind::Mock;
    }
    if (name == "live") {
        return BackendKind::Live;
    }
    throw ConfigError("backend must be 'mock' or 'live', got '" + std::string(name) + "'");
}

void RunConfig::validate() const {
    require(planner.max_iterations >= 1, "planner.max_iterations must be >= 1");
    require(planner.beam >= 1, "planner.beam must be >= 1");
    try {
        mcts.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("mcts: ") + e.what());
    }
    require(mcts.temperature >= 0 && mcts.temperature <= 2, "mcts.temperature must lie in [0,2]");
    require(archive.bins >= 1 && archive.bins <= 16, "archive.bins must lie in [1,16]");
    require(archive.iterations >= 0, "archive.iterations must be >= 0");
    require(archive.mutants_per_iteration >= 1, "archive.mutants_per_iteration must be >= 1");
    require(archive.bonus_iterations >= 0, "archive.bonus_iterations must be >= 0");
    require(archive.refine_rounds >= 0, "archive.refine_rounds must be >= 0");
    require(refiner.threshold >= 0 && refiner.threshold <= 1, "refiner.threshold must lie in [0,1]");
    require(refiner.max_cycles >= 1, "refiner.max_cycles must be >= 1");
    require(!refiner.profiles.empty(), "refiner.profiles must not be empty");
    require(workers >= 1, "workers must be >= 1");
    require(live.max_in_flight >= 1 && live.retries >= 1 && live.backoff_ms >= 0 && live.timeout_s >= 1,
            "live settings out of range");
    if (backend == BackendKind::Mock) {
        require(!mock_script.empty(), "the mock backend needs mock_script");
    }
}

RunConfig default_config() {
    RunConfig c;
    const auto data = default_data_dir();
    c.templates_dir = data / "templates";
    c.rules = data / "rules" / "default_rules.json";
    c.dataset = data / "datasets" / "create_sample.jsonl";
    c.mock_script = data / "mock" / "sample_script.json";
    c.metrics.subjective = arena_metrics();
    return c;
}

RunConfig parse_config(const json& j, const std::filesystem::path& base) {
    reject_unknown(j,
                   {"backend", "mock_script", "templates_dir", "rules", "dataset", "live", "planner", "mcts",
                    "archive", "refiner", "metrics", "seed", "workers"},
                   "$");
    RunConfig c = default_config();
    std::string backend = std::string(to_string(c.backend));
    read(j, "backend", backend, "$");
    c.backend = parse_backend_kind(backend);
    read_path(j, "mock_script", c.mock_script, base, "$");
    read_path(j, "templates_dir", c.templates_dir, base, "$");
    read_path(j, "rules", c.rules, base, "$");
    read_path(j, "dataset", c.dataset, base, "$");
    read(j, "seed", c.seed, "$");
    read(j, "workers", c.workers, "$");
    if (j.contains("live")) {
        const auto& l = j["live"];
        reject_unknown(l, {"endpoint", "model", "api_key_env", "max_in_flight", "retries", "backoff_ms", "timeout_s"},
                       "live");
        read(l, "endpoint", c.live.endpoint, "live");
        read(l, "model", c.live.model, "live");
        read(l, "api_key_env", c.live.api_key_env, "live");
        read(l, "max_in_flight", c.live.max_in_flight, "live");
        read(l, "retries", c.live.retries, "live");
        read(l, "backoff_ms", c.live.backoff_ms, "live");
        read(l, "timeout_s", c.live.timeout_s, "live");
    }
    if (j.contains("planner")) {
        const auto& p = j["planner"];
        reject_unknown(p, {"max_iterations", "beam"}, "planner");
        read(p, "max_iterations", c.planner.max_iterations, "planner");
        read(p, "beam", c.planner.beam, "planner");
    }
    if (j.contains("mcts")) {
        const auto& m = j["mcts"];
        reject_unknown(m, {"c", "u", "simulations", "depth_cap", "tau", "weights", "lookahead_len", "temperature"},
                       "mcts");
        read(m, "c", c.mcts.c, "mcts");
        read(m, "u", c.mcts.u, "mcts");
        read(m, "simulations", c.mcts.simulations, "mcts");
        read(m, "depth_cap", c.mcts.depth_cap, "mcts");
        read(m, "lookahead_len", c.mcts.lookahead_len, "mcts");
        read(m, "temperature", c.mcts.temperature, "mcts");
        const double tau = c.mcts.weights.tau;
        if (m.contains("weights")) {
            c.mcts.weights = read_weights(m["weights"]);
        }
        c.mcts.weights.tau = tau;
        read(m, "tau", c.mcts.weights.tau, "mcts");
    }
    if (j.contains("archive")) {
        const auto& a = j["archive"];
        reject_unknown(a,
                       {"bins", "iterations", "mutants_per_iteration", "bonus_iterations", "refine_rounds",
                        "temperature"},
                       "archive");
        read(a, "bins", c.archive.bins, "archive");
        read(a, "iterations", c.archive.iterations, "archive");
        read(a, "mutants_per_iteration", c.archive.mutants_per_iteration, "archive");
        read(a, "bonus_iterations", c.archive.bonus_iterations, "archive");
        read(a, "refine_rounds", c.archive.refine_rounds, "archive");
        read(a, "temperature", c.archive.temperature, "archive");
    }
    if (j.contains("refiner")) {
        const auto& r = j["refiner"];
        reject_unknown(r, {"threshold", "max_cycles", "profiles"}, "refiner");
        read(r, "threshold", c.refiner.threshold, "refiner");
        read(r, "max_cycles", c.refiner.max_cycles, "refiner");
        read(r, "profiles", c.refiner.profiles, "refiner");
    }
    if (j.contains("metrics")) {
        const auto& m = j["metrics"];
        reject_unknown(m, {"subjective", "external_scorer"}, "metrics");
        read(m, "subjective", c.metrics.subjective, "metrics");
        read(m, "external_scorer", c.metrics.external_scorer, "metrics");
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    json j;
    try {
        j = json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(j, std::filesystem::absolute(path).parent_path());
}

json to_json(const RunConfig& c) {
    return {{"backend", to_string(c.backend)},
            {"mock_script", c.mock_script.string()},
            {"templates_dir", c.templates_dir.string()},
            {"rules", c.rules.string()},
            {"dataset", c.dataset.string()},
            {"live",
             {{"endpoint", c.live.endpoint},
              {"model", c.live.model},
              {"api_key_env", c.live.api_key_env},
              {"max_in_flight", c.live.max_in_flight},
              {"retries", c.live.retries},
              {"backoff_ms", c.live.backoff_ms},
              {"timeout_s", c.live.timeout_s}}},
            {"planner", {{"max_iterations", c.planner.max_iterations}, {"beam", c.planner.beam}}},
            {"mcts",
             {{"c", c.mcts.c},
              {"u", c.mcts.u},
              {"simulations", c.mcts.simulations},
              {"depth_cap", c.mcts.depth_cap},
              {"tau", c.mcts.weights.tau},
              {"weights", {c.mcts.weights.w_sc, c.mcts.weights.w_im, c.mcts.weights.w_co}},
              {"lookahead_len", c.mcts.lookahead_len},
              {"temperature", c.mcts.temperature}}},
            {"archive",
             {{"bins", c.archive.bins},
              {"iterations", c.archive.iterations},
              {"mutants_per_iteration", c.archive.mutants_per_iteration},
              {"bonus_iterations", c.archive.bonus_iterations},
              {"refine_rounds", c.archive.refine_rounds},
              {"temperature", c.archive.temperature}}},
            {"refiner",
             {{"threshold", c.refiner.threshold},
              {"max_cycles", c.refiner.max_cycles},
              {"profiles", c.refiner.profiles}}},
            {"metrics", {{"subjective", c.metrics.subjective}, {"external_scorer", c.metrics.external_scorer}}},
            {"seed", c.seed},
            {"workers", c.workers}};
}

std::unique_ptr<Oracle> Runtime::make_oracle() const {
    RetryPolicy retry{config.live.retries, std::chrono::milliseconds(config.live.backoff_ms)};
    return std::make_unique<Oracle>(templates, backend, retry);
}

Runtime make_runtime(const RunConfig& config) {
    config.validate();
    Runtime rt;
    rt.config = config;
    rt.templates = std::make_shared<const TemplateRegistry>(TemplateRegistry::load(config.templates_dir));
    rt.rules = RuleLibrary::load(config.rules);
    if (config.backend == BackendKind::Mock) {
        rt.backend = std::make_shared<MockBackend>(MockBackend::load(config.mock_script));
    } else {
        LiveSettings s;
        s.endpoint = config.live.endpoint;
        if (const char* e = std::getenv("CUECRAFT_ENDPOINT"); e != nullptr && *e != '\0') {
            s.endpoint = e;
        }
        s.model = config.live.model;
        if (const char* k = std::getenv(config.live.api_key_env.c_str()); k != nullptr) {
            s.api_key = k;
        }
        s.max_in_flight = config.live.max_in_flight;
        s.timeout = std::chrono::seconds(config.live.timeout_s);
        rt.backend = std::make_shared<LiveBackend>(std::move(s));
    }
    return rt;
}

} // namespace cuecraft

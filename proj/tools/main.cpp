// cuecraft command-line driver.
#include "cuecraft/config.hpp"
#include "cuecraft/dataset.hpp"
#include "cuecraft/evaluation.hpp"
#include "cuecraft/pipeline.hpp"
#include "cuecraft/text.hpp"

#include <CLI11.hpp>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace cuecraft;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct CommonOptions {
    std::string config;
    std::optional<std::int64_t> seed;
    std::string backend;
    std::string out = "run";
    std::string dataset;
    std::optional<int> workers;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "Random seed");
    cmd->add_option("--backend", o.backend, "mock or live")->check(CLI::IsMember({"mock", "live"}));
    cmd->add_option("--out", o.out, "Run directory")->capture_default_str();
    cmd->add_option("--dataset", o.dataset, "JSON-lines dataset of {title, theme} records");
    cmd->add_option("--workers", o.workers, "Queries processed concurrently");
}

RunConfig resolve_config(const CommonOptions& o) {
    RunConfig c = o.config.empty() ? default_config() : load_config(o.config);
    if (!o.backend.empty()) {
        c.backend = parse_backend_kind(o.backend);
    }
    if (o.seed) {
        c.seed = *o.seed;
    }
    if (!o.dataset.empty()) {
        c.dataset = o.dataset;
    }
    if (o.workers) {
        c.workers = *o.workers;
    }
    c.validate();
    return c;
}

int run_stage_command(Stage stage, const CommonOptions& o, const StageOptions& stage_options) {
    const RunConfig config = resolve_config(o);
    const Runtime rt = make_runtime(config);
    const auto queries = load_dataset(config.dataset);
    const RunReport report = run_stage(stage, queries, rt, o.out, stage_options);
    const std::size_t failed = report.failed();
    std::printf("%s: %zu queries, %zu failed, output in %s\n", std::string(to_string(stage)).c_str(),
                report.queries.size(), failed, o.out.c_str());
    for (const auto& q : report.queries) {
        if (!q.ok) {
            std::fprintf(stderr, "  %s failed: %s\n", q.query_id.c_str(), q.error.c_str());
        }
    }
    return failed == 0 ? kOk : kFailed;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

int print_report(const std::string& dir) {
    const RunLayout layout{dir};
    if (!std::filesystem::exists(layout.report())) {
        std::fprintf(stderr, "no report.json in %s\n", dir.c_str());
        return kUsage;
    }
    const auto j = read_json_file(layout.report());
    std::printf("run %s  stage=%s  backend=%s  seed=%lld  status=%s\n", j.at("run_id").get<std::string>().c_str(),
                j.at("stage").get<std::string>().c_str(), j.at("backend").get<std::string>().c_str(),
                static_cast<long long>(j.at("seed").get<std::int64_t>()), j.at("status").get<std::string>().c_str());
    std::printf("%-6s %-8s %-8s %-7s %-6s %-6s %-6s %-7s %s\n", "query", "status", "elites", "ready", "routed",
                "bonus", "calls", "tokens", "title");
    for (const auto& q : j.at("queries")) {
        const auto& s = q.at("summary");
        const auto& oracle = q.at("oracle");
        auto count = [&](const char* section, const char* key) -> std::string {
            if (s.contains(section) && s[section].contains(key)) {
                return s[section][key].dump();
            }
            return "-";
        };
        const auto tokens = oracle.at("prompt_tokens").get<std::int64_t>() + oracle.at("completion_tokens").get<std::int64_t>();
        std::printf("%-6s %-8s %-8s %-7s %-6s %-6s %-6lld %-7lld %s\n", q.at("query_id").get<std::string>().c_str(),
                    q.at("status").get<std::string>().c_str(), count("archive", "occupied").c_str(),
                    count("refinement", "ready").c_str(), count("refinement", "route_back").c_str(),
                    count("refinement", "bonus_rounds").c_str(),
                    static_cast<long long>(oracle.at("calls").get<std::int64_t>()), static_cast<long long>(tokens),
                    q.at("title").get<std::string>().c_str());
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    spdlog::set_default_logger(spdlog::stderr_color_mt("cuecraft"));
    spdlog::set_level(spdlog::level::warn);

    CLI::App app{"Generate and evaluate creativity-assessment contexts"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Log progress to stderr");

    CommonOptions common;
    StageOptions stage_options;
    std::map<std::string, Stage> stages{{"plan", Stage::Plan},
                                        {"generate", Stage::Generate},
                                        {"evolve", Stage::Evolve},
                                        {"refine", Stage::Refine},
                                        {"pipeline", Stage::Pipeline}};
    const std::map<std::string, std::string> help{
        {"plan", "Build outlines with the hypertree planner"},
        {"generate", "Write seed contexts from the outlines"},
        {"evolve", "Evolve an elite archive from the seed contexts"},
        {"refine", "Simulate participants and gate the archive elites"},
        {"pipeline", "Run plan, generate, evolve and refine"}};
    std::map<std::string, CLI::App*> commands;
    for (const auto& [name, stage] : stages) {
        CLI::App* cmd = app.add_subcommand(name, help.at(name));
        add_common(cmd, common);
        if (name == "generate") {
            cmd->add_flag("--one-shot", stage_options.one_shot, "Write each seed with a single chat call");
        }
        commands[name] = cmd;
    }

    CLI::App* eval = app.add_subcommand("evaluate", "Compare context directories");
    add_common(eval, common);
    std::vector<std::string> methods;
    std::string reference;
    std::string expert;
    std::string metrics;
    eval->add_option("--method", methods, "Directory of <query id>.txt contexts (repeatable)")->required();
    eval->add_option("--reference", reference, "Reference method directory for pairwise judging");
    eval->add_option("--expert", expert, "Expert contexts for ROUGE");
    eval->add_option("--metrics", metrics, "Comma-separated judge metrics, or 'none'");

    CLI::App* report = app.add_subcommand("report", "Summarize a run directory");
    add_common(report, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }
    if (verbose) {
        spdlog::set_level(spdlog::level::info);
    }

    try {
        for (const auto& [name, cmd] : commands) {
            if (cmd->parsed()) {
                return run_stage_command(stages.at(name), common, stage_options);
            }
        }
        if (report->parsed()) {
            return print_report(common.out);
        }
        if (eval->parsed()) {
            const RunConfig config = resolve_config(common);
            EvaluationOptions opt;
            for (const auto& m : methods) {
                opt.method_dirs.emplace_back(m);
            }
            opt.metrics = metrics.empty() ? config.metrics.subjective : split_list(metrics);
            if (metrics == "none") {
                opt.metrics.clear();
            }
            if (!reference.empty()) {
                opt.reference_dir = reference;
            } else if (!opt.metrics.empty()) {
                std::fprintf(stderr,
                             "evaluate: judge metrics (%s) need --reference <dir>; pass --metrics none to compute "
                             "only text metrics\n",
                             cuecraft::join(opt.metrics, ",").c_str());
                return kUsage;
            }
            if (!expert.empty()) {
                opt.expert_dir = expert;
            }
            opt.external_scorer = config.metrics.external_scorer;
            const Runtime rt = make_runtime(config);
            auto oracle = rt.make_oracle();
            const auto result = run_evaluation(opt, *oracle);
            const std::string text = dump_json(result.to_json());
            write_text_file(std::filesystem::path(common.out) / "evaluation.json", text);
            for (const auto& r : result.arena) {
                std::printf("%-14s %-12s %6.2f%%  (%lld pairs, %lld invalid)\n", r.metric.c_str(), r.method.c_str(),
                            100.0 * r.positive_rate, static_cast<long long>(r.n_pairs),
                            static_cast<long long>(r.invalid_pairs));
            }
            std::printf("%s", dump_json(result.text_metrics).c_str());
            return kOk;
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kUsage;
    } catch (const RuleParseError& e) {
        std::fprintf(stderr, "rule error: %s\n", e.what());
        return kUsage;
    } catch (const DatasetParseError& e) {
        std::fprintf(stderr, "dataset error: %s\n", e.what());
        return kUsage;
    } catch (const TemplateError& e) {
        std::fprintf(stderr, "template error: %s\n", e.what());
        return kUsage;
    } catch (const AlignmentError& e) {
        std::fprintf(stderr, "alignment error: %s\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kFailed;
    }
    return kUsage;
}

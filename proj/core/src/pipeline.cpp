#include "cuecraft/pipeline.hpp"

#include "cuecraft/dataset.hpp"
#include "cuecraft/text.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <future>
#include <map>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

namespace cuecraft {
namespace {

using nlohmann::json;

json event(const std::string& qid, const char* stage, const char* name) {
    return {{"query_id", qid}, {"stage", stage}, {"event", name}};
}

json archive_summary(const EliteArchive& archive) {
    json elites = json::array();
    double best = 0.0;
    std::string best_id;
    for (const Context* c : archive.elites()) {
        elites.push_back(c->context_id);
        if (best_id.empty() || *c->fitness > best) {
            best = *c->fitness;
            best_id = c->context_id;
        }
    }
    return {{"occupied", archive.occupied()},
            {"generation", archive.generation()},
            {"best_fitness", best_id.empty() ? json(nullptr) : json(best)},
            {"best_context_id", best_id},
            {"elites", elites}};
}

std::uint64_t mix_seed(const std::string& label, std::int64_t seed) {
    return fnv1a64(label, fnv1a64(std::to_string(seed)));
}

json settings_json(const RunConfig& c) {
    json j = to_json(c);
    for (const char* key : {"mock_script", "templates_dir", "rules", "dataset"}) {
        j.erase(key);
    }
    return j;
}

std::vector<ParticipantProfile> configured_profiles(const Runtime& rt) {
    std::vector<ParticipantProfile> out;
    for (const auto& name : rt.config.refiner.profiles) {
        const std::string id = "profiles/" + to_lower(name);
        if (!rt.templates->contains(id)) {
            throw ConfigError("no template for participant profile '" + name + "'");
        }
        out.push_back({name, trim(rt.templates->get(id).user_text())});
    }
    return out;
}

json load_archive_entry(const RunLayout& layout, const std::string& qid) {
    if (!std::filesystem::exists(layout.archive())) {
        throw ConfigError("no archive.json in " + layout.root.string() + "; run the evolve stage first");
    }
    const json doc = read_json_file(layout.archive());
    for (const auto& entry : doc.at("archives")) {
        if (entry.at("query_id") == qid) {
            return entry.at("archive");
        }
    }
    throw ConfigError("archive.json has no entry for " + qid);
}

struct QueryJob {
    Stage stage;
    const Runtime& rt;
    const RunLayout& layout;
    const StageOptions& options;
};

void write_refinement(QueryRecord& rec, const EliteArchive& archive, const RefineOutcome& outcome) {
    std::map<std::string, int> counter;
    json reports = json::array();
    int ready = 0, routed = 0, warned = 0;
    for (const auto& r : outcome.reports) {
        const int k = ++counter[r.context_id];
        const std::filesystem::path rel =
            std::filesystem::path("refine") / (r.context_id + "." + std::to_string(k) + ".json");
        rec.files.emplace_back(rel, dump_json(to_json(r)));
        reports.push_back({{"context_id", r.context_id},
                           {"verdict", to_string(r.verdict)},
                           {"psi", r.psi},
                           {"cycle", r.cycle},
                           {"file", rel.generic_string()}});
        ready += r.verdict == Verdict::Ready;
        routed += r.verdict == Verdict::RouteBack;
        warned += r.verdict == Verdict::ReadyWithWarning;
    }
    rec.summary["refinement"] = {{"reports", reports},
                                 {"ready", ready},
                                 {"route_back", routed},
                                 {"ready_with_warning", warned},
                                 {"bonus_rounds", outcome.bonus_rounds}};
    rec.summary["archive"] = archive_summary(archive);
    if (const Context* best = best_elite(archive, outcome.reports)) {
        rec.files.emplace_back(std::filesystem::path("contexts") / (rec.query_id + ".txt"), best->text + "\n");
        rec.summary["final_context_id"] = best->context_id;
    }
    rec.archive = to_json(archive);
}

void run_query(const QueryJob& job, QueryRecord& rec) {
    const std::string& qid = rec.query_id;
    const Runtime& rt = job.rt;
    auto oracle = rt.make_oracle();
    const auto start = std::chrono::steady_clock::now();
    try {
        std::optional<Outline> outline;
        std::optional<Context> seed;
        std::optional<EliteArchive> archive;
        const bool all = job.stage == Stage::Pipeline;

        auto plan = [&] {
            PlanOutput p = plan_query(rec.query, rt, *oracle);
            rec.files.emplace_back(std::filesystem::path("outline") / (qid + ".json"),
                                   dump_json({{"query", {{"title", rec.query.title}, {"theme", rec.query.theme}}},
                                              {"chain", p.chain.chain_id},
                                              {"outline", to_json(p.outline)},
                                              {"tree", p.tree.to_json()}}));
            rec.summary["outline"] = {{"chain", p.chain.chain_id}, {"sections", p.outline.sections.size()}};
            json ev = event(qid, "plan", "outline_decided");
            ev["chain"] = p.chain.chain_id;
            ev["sections"] = p.outline.sections.size();
            rec.events.push_back(ev);
            outline = std::move(p.outline);
        };

        if (job.stage == Stage::Plan || all) {
            plan();
        }
        if (job.stage == Stage::Generate || all) {
            std::vector<SectionSearch> searches;
            if (job.options.one_shot) {
                seed = one_shot_seed(qid, rec.query, *oracle);
            } else {
                if (!outline) {
                    if (std::filesystem::exists(job.layout.outline(qid))) {
                        outline = outline_from_json(read_json_file(job.layout.outline(qid)).at("outline"));
                    } else {
                        plan();
                    }
                }
                seed = generate_query_seed(qid, rec.query, *outline, rt, *oracle, &searches);
                json trace = json::array();
                for (const auto& s : searches) {
                    trace.push_back(to_json(s));
                }
                rec.files.emplace_back(std::filesystem::path("seeds") / (qid + ".trace.json"), dump_json(trace));
            }
            rec.files.emplace_back(std::filesystem::path("seeds") / (qid + ".json"), dump_json(to_json(*seed)));
            rec.summary["seed_context_id"] = seed->context_id;
            json ev = event(qid, "generate", "seed_generated");
            ev["context_id"] = seed->context_id;
            ev["sentences"] = segment_sentences(seed->text).size();
            rec.events.push_back(ev);
        }
        if (job.stage == Stage::Evolve || all) {
            if (!seed) {
                if (!std::filesystem::exists(job.layout.seed(qid))) {
                    throw ConfigError("no seed context for " + qid + "; run the generate stage first");
                }
                seed = context_from_json(read_json_file(job.layout.seed(qid)));
            }
            archive = evolve_query(qid, *seed, rt, *oracle, rec.events);
            rec.summary["archive"] = archive_summary(*archive);
            rec.archive = to_json(*archive);
        }
        if (job.stage == Stage::Refine || all) {
            if (!archive) {
                archive = archive_from_json(load_archive_entry(job.layout, qid));
            }
            const RefineOutcome outcome = refine_query(qid, *archive, rt, *oracle, rec.events);
            write_refinement(rec, *archive, outcome);
        }
        rec.ok = true;
    } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
        json ev = event(qid, std::string(to_string(job.stage)).c_str(), "query_failed");
        ev["error"] = rec.error;
        rec.events.push_back(ev);
        spdlog::error("{}: {}", qid, rec.error);
    }
    rec.tally = oracle->tally();
    rec.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + " is not valid JSON: " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ConfigError("cannot write " + path.string());
    }
    out << text;
}

PlanOutput plan_query(const Query& query, const Runtime& rt, Oracle& oracle) {
    PlanOutput out;
    out.tree = ht_construct(query, rt.rules, rt.config.planner, oracle);
    out.outline = ht_decide(out.tree, query, oracle, &out.chain);
    return out;
}

Context generate_query_seed(const std::string& qid, const Query& query, const Outline& outline, const Runtime& rt,
                            Oracle& oracle, std::vector<SectionSearch>* searches) {
    MctsBudget budget = rt.config.mcts;
    return generate_seed(query, outline, budget, oracle, qid + "-seed", searches);
}

Context one_shot_seed(const std::string& qid, const Query& query, Oracle& oracle) {
    query.validate();
    OracleRequest req{RequestKind::Generate, "chat_context", {{"title", query.title}, {"theme", query.theme}}, {}};
    Context c;
    c.context_id = qid + "-seed";
    c.text = trim(oracle.complete(req));
    if (c.text.empty()) {
        throw EmptyGeneration("one-shot generation for " + qid + " returned no text");
    }
    return c;
}

EliteArchive evolve_query(const std::string& qid, const Context& seed, const Runtime& rt, Oracle& oracle,
                          std::vector<nlohmann::json>& events) {
    const auto& a = rt.config.archive;
    EvolutionOptions opt;
    opt.iterations = a.iterations;
    opt.mutants_per_iteration = a.mutants_per_iteration;
    opt.temperature = a.temperature;
    opt.rng_seed = mix_seed(qid, rt.config.seed);
    opt.id_prefix = qid;
    opt.on_error = [&](const std::string& id, const std::string& error) {
        json ev = event(qid, "evolve", "mutant_failed");
        ev["context_id"] = id;
        ev["error"] = error;
        events.push_back(ev);
    };
    EvolutionStats stats;
    EliteArchive archive = evolve(EliteArchive(a.bins), {seed}, opt, oracle, &stats);
    json ev = event(qid, "evolve", "archive_evolved");
    ev["occupied"] = archive.occupied();
    ev["generation"] = archive.generation();
    ev["mutants_attempted"] = stats.mutants_attempted;
    ev["mutants_failed"] = stats.mutants_failed;
    events.push_back(ev);
    return archive;
}

RefineOutcome refine_query(const std::string& qid, EliteArchive& archive, const Runtime& rt, Oracle& oracle,
                           std::vector<nlohmann::json>& events) {
    RefinerOptions ropt{rt.config.refiner.threshold, rt.config.refiner.max_cycles, configured_profiles(rt)};
    RefinementLedger ledger;
    RefineOutcome out;
    std::set<std::string> refined;
    for (int round = 0;; ++round) {
        std::vector<Context> pending;
        for (const Context* c : archive.elites()) {
            if (!refined.count(c->context_id)) {
                pending.push_back(*c);
            }
        }
        std::vector<Context> routed;
        for (const auto& ctx : pending) {
            EffectivenessReport report = refine(ctx, ropt, oracle, ledger);
            refined.insert(ctx.context_id);
            json ev = event(qid, "refine", "refined");
            ev["context_id"] = ctx.context_id;
            ev["verdict"] = to_string(report.verdict);
            ev["psi"] = report.psi;
            ev["cycle"] = report.cycle;
            events.push_back(ev);
            if (report.verdict == Verdict::RouteBack) {
                json rb = event(qid, "refine", "route_back_enqueued");
                rb["context_id"] = ctx.context_id;
                events.push_back(rb);
                routed.push_back(ctx);
            }
            out.reports.push_back(std::move(report));
        }
        if (routed.empty() || round >= rt.config.archive.refine_rounds) {
            break;
        }
        ++out.bonus_rounds;
        json ev = event(qid, "evolve", "bonus_round");
        ev["round"] = out.bonus_rounds;
        ev["iterations"] = rt.config.archive.bonus_iterations;
        json parents = json::array();
        for (const auto& c : routed) {
            parents.push_back(c.context_id);
        }
        ev["parents"] = parents;
        events.push_back(ev);

        EvolutionOptions opt;
        opt.iterations = rt.config.archive.bonus_iterations;
        opt.mutants_per_iteration = rt.config.archive.mutants_per_iteration;
        opt.temperature = rt.config.archive.temperature;
        opt.rng_seed = mix_seed(qid + "/bonus/" + std::to_string(out.bonus_rounds), rt.config.seed);
        opt.id_prefix = qid;
        opt.on_error = [&](const std::string& id, const std::string& error) {
            json fe = event(qid, "evolve", "mutant_failed");
            fe["context_id"] = id;
            fe["error"] = error;
            events.push_back(fe);
        };
        run_iterations(archive, opt, oracle, &routed);
    }
    return out;
}

const Context* best_elite(const EliteArchive& archive, const std::vector<EffectivenessReport>& reports) {
    std::map<std::string, Verdict> latest;
    for (const auto& r : reports) {
        latest[r.context_id] = r.verdict;
    }
    auto pick = [&](bool ready_only) -> const Context* {
        const Context* best = nullptr;
        for (const Context* c : archive.elites()) {
            if (ready_only) {
                auto it = latest.find(c->context_id);
                if (it == latest.end() || it->second != Verdict::Ready) {
                    continue;
                }
            }
            if (best == nullptr || *c->fitness > *best->fitness) {
                best = c;
            }
        }
        return best;
    };
    const Context* ready = pick(true);
    return ready != nullptr ? ready : pick(false);
}

std::string_view to_string(Stage stage) {
    switch (stage) {
    case Stage::Plan: return "plan";
    case Stage::Generate: return "generate";
    case Stage::Evolve: return "evolve";
    case Stage::Refine: return "refine";
    case Stage::Pipeline: return "pipeline";
    }
    return "pipeline";
}

std::size_t RunReport::failed() const {
    return static_cast<std::size_t>(std::count_if(queries.begin(), queries.end(), [](const QueryRecord& r) { return !r.ok; }));
}

nlohmann::json RunReport::to_json() const {
    json qs = json::array();
    CallTally total;
    for (const auto& r : queries) {
        json q{{"query_id", r.query_id},
               {"title", r.query.title},
               {"theme", r.query.theme},
               {"status", r.ok ? "ok" : "failed"},
               {"summary", r.summary},
               {"oracle", cuecraft::to_json(r.tally)}};
        if (!r.ok) {
            q["error"] = r.error;
        }
        if (backend == BackendKind::Live) {
            q["elapsed_s"] = r.elapsed_s;
        }
        qs.push_back(std::move(q));
        total.calls += r.tally.calls;
        total.failed_calls += r.tally.failed_calls;
        total.prompt_tokens += r.tally.prompt_tokens;
        total.completion_tokens += r.tally.completion_tokens;
        for (const auto& [k, v] : r.tally.calls_by_kind) {
            total.calls_by_kind[k] += v;
        }
    }
    const std::size_t bad = failed();
    return {{"run_id", run_id},
            {"stage", to_string(stage)},
            {"backend", cuecraft::to_string(backend)},
            {"seed", seed},
            {"status", bad == 0 ? "ok" : (bad == queries.size() ? "failed" : "partial")},
            {"queries", std::move(qs)},
            {"totals", cuecraft::to_json(total)}};
}

RunReport run_stage(Stage stage, const std::vector<Query>& queries, const Runtime& rt,
                    const std::filesystem::path& out_dir, const StageOptions& options) {
    const RunLayout layout{out_dir};
    std::filesystem::create_directories(out_dir);

    RunReport report;
    report.stage = stage;
    report.backend = rt.config.backend;
    report.seed = rt.config.seed;
    report.queries.resize(queries.size());
    std::string fingerprint_src = settings_json(rt.config).dump() + "|" + std::string(to_string(stage));
    for (std::size_t i = 0; i < queries.size(); ++i) {
        report.queries[i].query_id = query_id(i);
        report.queries[i].query = queries[i];
        fingerprint_src += "|" + queries[i].title + "\x1f" + queries[i].theme;
    }
    report.run_id = "run-" + to_hex(fnv1a64(fingerprint_src));

    const QueryJob job{stage, rt, layout, options};
    const std::size_t workers = static_cast<std::size_t>(std::max(1, rt.config.workers));
    for (std::size_t start = 0; start < queries.size(); start += workers) {
        const std::size_t end = std::min(queries.size(), start + workers);
        if (end - start == 1) {
            run_query(job, report.queries[start]);
            continue;
        }
        std::vector<std::future<void>> pending;
        for (std::size_t i = start; i < end; ++i) {
            pending.push_back(std::async(std::launch::async, [&job, &report, i] { run_query(job, report.queries[i]); }));
        }
        for (auto& f : pending) {
            f.get();
        }
    }

    // Single writer: everything is persisted here, in query order.
    for (const auto& rec : report.queries) {
        for (const auto& [rel, text] : rec.files) {
            write_text_file(out_dir / rel, text);
        }
    }
    if (stage == Stage::Evolve || stage == Stage::Refine || stage == Stage::Pipeline) {
        std::map<std::string, json> previous;
        if (stage == Stage::Refine && std::filesystem::exists(layout.archive())) {
            const json doc = read_json_file(layout.archive());
            for (const auto& e : doc.at("archives")) {
                previous[e.at("query_id").get<std::string>()] = e;
            }
        }
        json archives = json::array();
        for (const auto& rec : report.queries) {
            if (!rec.archive.is_null()) {
                archives.push_back({{"query_id", rec.query_id},
                                    {"query", {{"title", rec.query.title}, {"theme", rec.query.theme}}},
                                    {"archive", rec.archive}});
            } else if (auto it = previous.find(rec.query_id); it != previous.end()) {
                archives.push_back(it->second);
            }
        }
        write_text_file(layout.archive(), dump_json({{"archives", archives}}));
    }
    {
        std::ofstream ev(layout.events(), std::ios::binary | (stage == Stage::Pipeline ? std::ios::trunc : std::ios::app));
        std::size_t seq = 0;
        for (const auto& rec : report.queries) {
            for (json e : rec.events) {
                e["seq"] = seq++;
                e["run_id"] = report.run_id;
                ev << e.dump() << "\n";
            }
        }
    }
    json timing = json::object();
    double total = 0;
    for (const auto& rec : report.queries) {
        timing[rec.query_id] = rec.elapsed_s;
        total += rec.elapsed_s;
    }
    timing["total_s"] = total;
    write_text_file(layout.timing(), dump_json(timing));
    write_text_file(layout.report(), dump_json(report.to_json()));
    return report;
}

RunReport run_pipeline(const std::vector<Query>& queries, const Runtime& rt, const std::filesystem::path& out_dir) {
    return run_stage(Stage::Pipeline, queries, rt, out_dir);
}

} // namespace cuecraft

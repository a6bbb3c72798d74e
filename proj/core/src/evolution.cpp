#include "cuecraft/evolution.hpp"

#include "cuecraft/text.hpp"

#include <algorithm>
#include <cstdio>
#include <future>
#include <map>
#include <random>

#include <spdlog/spdlog.h>

namespace cuecraft {
namespace {

constexpr MutationOperator kOperators[] = {MutationOperator::Insertion, MutationOperator::Deletion,
                                           MutationOperator::Replacement};

std::string_view instruction(MutationOperator op) {
    switch (op) {
    case MutationOperator::Insertion:
        return "Insert new sentences or details that move the scenario toward the target. Keep all existing text.";
    case MutationOperator::Deletion:
        return "Delete sentences or a paragraph that pull the scenario away from the target. Leave the rest as is.";
    case MutationOperator::Replacement:
        return "Rewrite selected sentences or one paragraph in place so the scenario moves toward the target.";
    }
    return "";
}

std::string fixed2(double v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string mutant_id(const std::string& prefix, int generation, int k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "-g%03d-m%02d", generation, k);
    return prefix + buf;
}

// Uniform draw in [0, n) by modulo so sequences match across standard libraries.
std::size_t draw(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

BehaviorDescriptor pick_target(const EliteArchive& archive, const Context& parent, std::mt19937_64& rng) {
    const int bins = archive.bins();
    const auto empty = archive.empty_niches();
    const bool aim_empty = draw(rng, 2) == 0;
    if (aim_empty && !empty.empty()) {
        return niche_center(empty[draw(rng, empty.size())], bins);
    }
    NicheIndex n = niche_index(parent.descriptor.value_or(BehaviorDescriptor{}), bins);
    auto shift = [&](int& axis) {
        axis = std::clamp(axis + static_cast<int>(draw(rng, 3)) - 1, 0, bins - 1);
    };
    shift(n.i);
    shift(n.j);
    shift(n.k);
    return niche_center(n, bins);
}

} // namespace

BehaviorDescriptor describe(const Context& context, Oracle& oracle) {
    if (trim(context.text).empty()) {
        throw DomainError("cannot describe an empty context");
    }
    OracleRequest req{RequestKind::DescribeBehavior, "describe_behavior", {{"context", context.text}}, {}};
    return oracle.complete_structured(std::move(req), [](std::string_view reply) {
        const auto obj = extract_json_object(reply);
        auto unit = [&](const char* key) { return std::clamp(read_number(obj, key), 0.0, 1.0); };
        return BehaviorDescriptor{unit("proximity_scope"), unit("knowledge_density"), unit("viewpoint_diversity")};
    });
}

double fitness(const Context& context, Oracle& oracle) {
    if (trim(context.text).empty()) {
        throw DomainError("cannot score an empty context");
    }
    const QualityScores q = oracle.score_context(context.text);
    return (q.s_coh + q.s_rel + q.s_eng) / 3.0;
}

Context mutate(const Context& parent, const MutationSpec& spec, Oracle& oracle, std::string child_id,
               double temperature, std::optional<std::int64_t> seed) {
    if (trim(parent.text).empty()) {
        throw DomainError("cannot mutate an empty context");
    }
    OracleRequest req{RequestKind::Generate,
                      "mutate_context",
                      {{"operator", std::string(to_string(spec.op))},
                       {"operator_instruction", std::string(instruction(spec.op))},
                       {"target_scope", fixed2(spec.target.phi1)},
                       {"target_density", fixed2(spec.target.phi2)},
                       {"target_viewpoints", fixed2(spec.target.phi3)},
                       {"parent_text", parent.text}},
                      {temperature, 1, seed}};
    const std::string parent_text = trim(parent.text);
    std::string text = oracle.complete_structured(std::move(req), [&](std::string_view reply) {
        std::string t = trim(reply);
        if (t.empty()) {
            throw EmptyGeneration("mutation of " + parent.context_id + " returned no text");
        }
        if (t == parent_text) {
            throw NoOpMutation("the edit returned the scenario unchanged; apply the " +
                               std::string(to_string(spec.op)) + " operation");
        }
        return t;
    });
    Context child;
    child.context_id = std::move(child_id);
    child.text = std::move(text);
    child.outline = parent.outline;
    child.provenance = Provenance::Mutant;
    child.lineage.push_back(parent.context_id);
    child.lineage.insert(child.lineage.end(), parent.lineage.begin(), parent.lineage.end());
    child.op = spec.op;
    return child;
}

void ensure_evaluated(Context& context, Oracle& oracle) {
    if (!context.descriptor) {
        context.descriptor = describe(context, oracle);
    }
    if (!context.fitness) {
        context.fitness = fitness(context, oracle);
    }
}

void insert_seeds(EliteArchive& archive, std::vector<Context> seeds, Oracle& oracle) {
    for (auto& seed : seeds) {
        ensure_evaluated(seed, oracle);
        archive.try_insert(seed);
    }
}

EvolutionStats run_iterations(EliteArchive& archive, const EvolutionOptions& options, Oracle& oracle,
                              const std::vector<Context>* parent_pool) {
    if (options.iterations < 0 || options.mutants_per_iteration < 1) {
        throw DomainError("iterations must be >= 0 and mutants_per_iteration >= 1");
    }
    EvolutionStats stats;
    std::mt19937_64 rng(options.rng_seed);
    std::map<std::string, std::size_t> operator_turn;
    const std::size_t workers = static_cast<std::size_t>(std::max(1, options.workers));

    for (int it = 0; it < options.iterations; ++it) {
        archive.advance_generation();
        const int gen = archive.generation();
        std::vector<Context> parents;
        if (parent_pool != nullptr) {
            parents = *parent_pool;
        } else {
            for (const Context* e : archive.elites()) {
                parents.push_back(*e);
            }
        }
        if (parents.empty()) {
            break;
        }
        struct Job {
            const Context* parent;
            MutationSpec spec;
            std::string id;
        };
        std::vector<Job> jobs;
        for (int k = 0; k < options.mutants_per_iteration; ++k) {
            const Context& parent = parents[draw(rng, parents.size())];
            const MutationOperator op = kOperators[operator_turn[parent.context_id]++ % 3];
            jobs.push_back({&parent, {op, pick_target(archive, parent, rng), parent.context_id},
                            mutant_id(options.id_prefix, gen, k)});
        }

        std::vector<std::optional<Context>> results(jobs.size());
        std::vector<std::string> errors(jobs.size());
        auto run_job = [&](std::size_t i) {
            try {
                Context child = mutate(*jobs[i].parent, jobs[i].spec, oracle, jobs[i].id, options.temperature);
                child.descriptor = describe(child, oracle);
                child.fitness = fitness(child, oracle);
                results[i] = std::move(child);
            } catch (const Error& e) {
                errors[i] = e.what();
            }
        };
        for (std::size_t start = 0; start < jobs.size(); start += workers) {
            const std::size_t end = std::min(jobs.size(), start + workers);
            if (workers == 1) {
                run_job(start);
                continue;
            }
            std::vector<std::future<void>> pending;
            for (std::size_t i = start; i < end; ++i) {
                pending.push_back(std::async(std::launch::async, run_job, i));
            }
            for (auto& f : pending) {
                f.get();
            }
        }

        int failed = 0;
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            ++stats.mutants_attempted;
            if (results[i]) {
                archive.try_insert(*results[i]);
                continue;
            }
            ++failed;
            ++stats.mutants_failed;
            spdlog::warn("mutant {} failed: {}", jobs[i].id, errors[i]);
            if (options.on_error) {
                options.on_error(jobs[i].id, errors[i]);
            }
        }
        if (failed == static_cast<int>(jobs.size())) {
            spdlog::warn("generation {} produced no usable mutant", gen);
        }
        ++stats.iterations_run;
    }
    return stats;
}

EliteArchive evolve(EliteArchive archive, const std::vector<Context>& seeds, const EvolutionOptions& options,
                    Oracle& oracle, EvolutionStats* stats) {
    if (seeds.empty()) {
        throw DomainError("evolution needs at least one seed");
    }
    insert_seeds(archive, seeds, oracle);
    const EvolutionStats s = run_iterations(archive, options, oracle);
    if (stats != nullptr) {
        *stats = s;
    }
    return archive;
}

} // namespace cuecraft

#pragma once

#include "cuecraft/archive.hpp"
#include "cuecraft/context.hpp"
#include "cuecraft/oracle.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cuecraft {

/// One DescribeBehavior call; components are clamped to [0, 1].
BehaviorDescriptor describe(const Context& context, Oracle& oracle);

/// Uniform average of the three quality scores from one ScoreContext call.
double fitness(const Context& context, Oracle& oracle);

struct MutationSpec {
    MutationOperator op = MutationOperator::Insertion;
    BehaviorDescriptor target;
    std::string parent;
};

/// Edits the parent toward the target niche. The child records the parent in its
/// lineage. Throws EmptyGeneration for an empty reply and NoOpMutation when the
/// reply equals the parent text after one re-ask.
Context mutate(const Context& parent, const MutationSpec& spec, Oracle& oracle, std::string child_id,
               double temperature = 0.8, std::optional<std::int64_t> seed = std::nullopt);

/// Describes and scores a context unless both values are already cached on it.
void ensure_evaluated(Context& context, Oracle& oracle);

struct EvolutionOptions {
    int iterations = 30;
    int mutants_per_iteration = 4;
    int workers = 1;
    double temperature = 0.8;
    std::uint64_t rng_seed = 0;
    /// Mutant ids are "<prefix>-g<generation>-m<k>".
    std::string id_prefix = "ctx";
    /// Called for every mutant that fails; the iteration continues.
    std::function<void(const std::string& context_id, const std::string& error)> on_error;
};

struct EvolutionStats {
    int mutants_attempted = 0;
    int mutants_failed = 0;
    int iterations_run = 0;
};

/// Describes, scores and inserts each seed.
void insert_seeds(EliteArchive& archive, std::vector<Context> seeds, Oracle& oracle);

/// Runs `options.iterations` generations. Parents are drawn uniformly from
/// `parent_pool` when given, otherwise from the current elites. Operators cycle
/// per parent; targets aim at a random empty niche or a neighbour of the
/// parent's niche with equal probability.
EvolutionStats run_iterations(EliteArchive& archive, const EvolutionOptions& options, Oracle& oracle,
                              const std::vector<Context>* parent_pool = nullptr);

/// insert_seeds followed by run_iterations.
EliteArchive evolve(EliteArchive archive, const std::vector<Context>& seeds, const EvolutionOptions& options,
                    Oracle& oracle, EvolutionStats* stats = nullptr);

} // namespace cuecraft

// Microbenchmarks for the pure hot paths: text metrics, tree search bookkeeping
// and archive insertion.
#include "cuecraft/archive.hpp"
#include "cuecraft/mcts.hpp"
#include "cuecraft/metrics.hpp"
#include "cuecraft/text.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <string>

namespace {

using namespace cuecraft;

std::string random_text(std::size_t words, std::uint64_t seed) {
    static const char* vocab[] = {"the", "city", "council", "voted", "to",   "open", "a",     "new",   "park",
                                  "and", "residents", "argued", "about", "cost", "time", "trust", "data", "rules"};
    std::mt19937_64 rng(seed);
    std::string out;
    for (std::size_t i = 0; i < words; ++i) {
        out += vocab[rng() % (sizeof vocab / sizeof *vocab)];
        out += (i % 12 == 11) ? ". " : " ";
    }
    return out;
}

void BM_SegmentSentences(benchmark::State& state) {
    const std::string text = random_text(static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(segment_sentences(text));
    }
}
BENCHMARK(BM_SegmentSentences)->Arg(100)->Arg(1000);

void BM_RougeL(benchmark::State& state) {
    const std::string a = random_text(static_cast<std::size_t>(state.range(0)), 2);
    const std::string b = random_text(static_cast<std::size_t>(state.range(0)), 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(rouge_l(a, b));
    }
}
BENCHMARK(BM_RougeL)->Arg(100)->Arg(600);

void BM_Rouge1(benchmark::State& state) {
    const std::string a = random_text(600, 4);
    const std::string b = random_text(600, 5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(rouge_1(a, b));
    }
}
BENCHMARK(BM_Rouge1);

void BM_DiverseVerbs(benchmark::State& state) {
    const VerbLexicon& lex = default_verb_lexicon();
    const std::string text = random_text(600, 6);
    for (auto _ : state) {
        benchmark::DoNotOptimize(diverse_verbs(text, lex));
    }
}
BENCHMARK(BM_DiverseVerbs);

void BM_SelectBackpropagate(benchmark::State& state) {
    // Full binary tree of the given depth with random rewards.
    SearchTree tree;
    std::vector<SearchNodeId> frontier{tree.root()};
    for (int d = 0; d < state.range(0); ++d) {
        std::vector<SearchNodeId> next;
        for (auto id : frontier) {
            next.push_back(tree.add_child(id, "a."));
            next.push_back(tree.add_child(id, "b."));
        }
        frontier = std::move(next);
    }
    std::mt19937_64 rng(7);
    for (auto id : frontier) {
        backpropagate(tree, id, static_cast<double>(rng() % 1000) / 1000.0);
    }
    for (auto _ : state) {
        const SearchNodeId leaf = select(tree, 1.414);
        backpropagate(tree, leaf, 0.5);
    }
}
BENCHMARK(BM_SelectBackpropagate)->Arg(6)->Arg(10);

void BM_ArchiveInsert(benchmark::State& state) {
    std::mt19937_64 rng(11);
    std::vector<Context> candidates(1024);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        auto u = [&] { return static_cast<double>(rng() % 10000) / 10000.0; };
        candidates[i].context_id = "c" + std::to_string(i);
        candidates[i].text = "x";
        candidates[i].descriptor = BehaviorDescriptor{u(), u(), u()};
        candidates[i].fitness = u();
    }
    for (auto _ : state) {
        EliteArchive archive(static_cast<int>(state.range(0)));
        for (const auto& c : candidates) {
            archive.try_insert(c);
        }
        benchmark::DoNotOptimize(archive.occupied());
    }
}
BENCHMARK(BM_ArchiveInsert)->Arg(3)->Arg(10);

} // namespace

BENCHMARK_MAIN();

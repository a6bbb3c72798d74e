#include "cuecraft/errors.hpp"
#include "cuecraft/metrics.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace cuecraft;

namespace {
bool near(double a, double b, double eps = 1e-12) { return std::abs(a - b) <= eps; }
} // namespace

TEST_CASE("diverse_verbs") {
    CHECK(near(diverse_verbs("run run run"), 100.0 / 3.0));
    CHECK(diverse_verbs("run jump swim") == 100.0);
    CHECK(diverse_verbs("") == 100.0);
    CHECK(diverse_verbs("the blue table") == 100.0);
    // Inflections fold onto one lemma.
    CHECK(near(diverse_verbs("She ran, he runs, they are running."), 100.0 * 2.0 / 4.0));
    CHECK(default_verb_lexicon().lemma_count() > 4000);
}

TEST_CASE("verb lexicon parsing and suffix folding") {
    const auto lex = VerbLexicon::parse("# comment\nwalk walked walking walks\ngo went gone going goes\nstop\nbake\n");
    CHECK(lex.lemma_count() == 4);
    CHECK(lex.lemma_of("went") == "go");
    CHECK(lex.lemma_of("walk") == "walk");
    CHECK(lex.lemma_of("stopped") == "stop");
    CHECK(lex.lemma_of("stopping") == "stop");
    CHECK(lex.lemma_of("baking") == "bake");
    CHECK(lex.lemma_of("bakes") == "bake");
    CHECK_FALSE(lex.lemma_of("table").has_value());
    CHECK(diverse_verbs("walked went walks", lex) == doctest::Approx(200.0 / 3.0));
}

TEST_CASE("rouge tokens") {
    CHECK(rouge_tokens("The Cat, sat!") == std::vector<std::string>{"the", "cat", "sat"});
    CHECK(rouge_tokens("don't stop") == std::vector<std::string>{"dont", "stop"});
    CHECK(rouge_tokens("  ").empty());
}

TEST_CASE("rouge_1") {
    auto s = rouge_1("the cat sat", "the cat ran");
    CHECK(near(s.precision, 2.0 / 3));
    CHECK(near(s.recall, 2.0 / 3));
    CHECK(near(s.f1, 2.0 / 3));
    s = rouge_1("Same words here.", "same words here");
    CHECK(s.precision == 1.0);
    CHECK(s.recall == 1.0);
    CHECK(s.f1 == 1.0);
    s = rouge_1("alpha beta", "gamma delta");
    CHECK(s.precision == 0.0);
    CHECK(s.recall == 0.0);
    CHECK(s.f1 == 0.0);
    // Clipping: "the" appears twice in the candidate but once in the reference.
    s = rouge_1("the the cat", "the cat");
    CHECK(near(s.precision, 2.0 / 3));
    CHECK(s.recall == 1.0);
    s = rouge_1("", "");
    CHECK(s.f1 == 0.0);
}

TEST_CASE("rouge_l") {
    auto s = rouge_l("a b c d", "a c d");
    CHECK(near(s.precision, 0.75));
    CHECK(s.recall == 1.0);
    CHECK(near(s.f1, 2 * 0.75 / 1.75));
    CHECK(s.f1 == doctest::Approx(0.857).epsilon(1e-3));
    s = rouge_l("x y z", "x y z");
    CHECK(s.f1 == 1.0);
    s = rouge_l("a b c", "c b a");
    CHECK(near(s.precision, 1.0 / 3));
    CHECK(near(s.recall, 1.0 / 3));
}

TEST_CASE("rouge properties on random sequences") {
    std::mt19937_64 rng(11);
    const char* vocab[] = {"a", "b", "c", "d", "e", "f"};
    for (int t = 0; t < 300; ++t) {
        auto sample = [&] {
            std::string out;
            const int n = static_cast<int>(rng() % 12);
            for (int i = 0; i < n; ++i) {
                out += std::string(vocab[rng() % 6]) + " ";
            }
            return out;
        };
        const auto c = sample();
        const auto r = sample();
        const auto l = rouge_l(c, r);
        const auto u = rouge_1(c, r);
        CHECK(l.f1 <= u.f1 + 1e-12);
        const auto swapped = rouge_l(r, c);
        CHECK(near(swapped.precision, l.recall));
        CHECK(near(swapped.f1, l.f1));
    }
}

TEST_CASE("cohens_kappa") {
    CHECK(cohens_kappa({"W", "L", "T", "W"}, {"W", "L", "T", "W"}) == 1.0);
    CHECK(near(cohens_kappa({"W", "W", "L", "L"}, {"W", "L", "W", "L"}), 0.0));
    CHECK(near(cohens_kappa({"W", "W", "W"}, {"L", "L", "L"}), 0.0));
    CHECK(cohens_kappa({"W", "W"}, {"W", "W"}) == 1.0);
    // p_o = 0.75; p_e = 0.5*0.75 + 0.5*0.25 = 0.5; kappa = 0.5
    CHECK(near(cohens_kappa({"W", "W", "L", "L"}, {"W", "W", "W", "L"}), 0.5));
    CHECK(cohens_kappa({"W", "L"}, {"L", "W"}) <= 1.0);
    CHECK_THROWS_AS(cohens_kappa({"W"}, {"W", "L"}), LengthMismatch);
    CHECK_THROWS_AS(cohens_kappa({}, {}), LengthMismatch);
}

TEST_CASE("spearman") {
    CHECK(near(spearman({1, 2, 3, 4}, {1, 3, 2, 4}), 0.8));
    CHECK(near(spearman({1, 2, 3}, {10, 20, 30}), 1.0));
    CHECK(near(spearman({1, 2, 3}, {3, 2, 1}), -1.0));
    // Monotone transforms leave rho unchanged.
    CHECK(near(spearman({1, 2, 3, 4}, {1, 27, 8, 64}), 0.8));
    // Ties take average ranks: x ranks (1.5,1.5,3), y ranks (1,2,3) -> rho = sqrt(3)/2.
    CHECK(near(spearman({5, 5, 7}, {1, 2, 3}), std::sqrt(3.0) / 2.0));
    CHECK_THROWS_AS(spearman({1, 2}, {1}), LengthMismatch);
    CHECK_THROWS_AS(spearman({1}, {1}), DegenerateInput);
    CHECK_THROWS_AS(spearman({1, 1, 1}, {1, 2, 3}), DegenerateInput);
}

TEST_CASE("r_squared") {
    CHECK(near(r_squared({0, 1, 2, 3}, {1, 3, 5, 7}), 1.0));
    CHECK(r_squared({0, 1, 2}, {4, 4, 4}) == 1.0);
    CHECK(near(r_squared({0, 1, 2}, {0, 1, 1}), 0.75));
    CHECK_THROWS_AS(r_squared({2, 2, 2}, {0, 1, 2}), DegenerateInput);
    CHECK_THROWS_AS(r_squared({1, 2}, {1}), LengthMismatch);
}

#include "cuecraft/errors.hpp"
#include "cuecraft/refiner.hpp"

#include "test_support.hpp"

#include <doctest.h>

using namespace cuecraft;
using namespace cuecraft::testing;

namespace {

Context make(std::string id, std::vector<std::string> lineage = {}) {
    Context c;
    c.context_id = std::move(id);
    c.text = "A scenario about " + c.context_id + ".";
    c.lineage = std::move(lineage);
    return c;
}

std::vector<ParticipantProfile> profiles(int n) {
    std::vector<ParticipantProfile> out;
    for (int i = 0; i < n; ++i) {
        out.push_back({"P" + std::to_string(i), "style-" + std::to_string(i)});
    }
    return out;
}

// Each profile's response carries its style tag; ratings are looked up by tag.
std::unique_ptr<Oracle> rated(std::vector<int> ratings, int* calls = nullptr) {
    return scripted_oracle([ratings, calls](const PromptRequest& r) {
        if (calls != nullptr) {
            ++*calls;
        }
        if (r.request.template_id == "simulate_response") {
            CHECK(r.request.sampling.temperature == 0.0);
            return "Answer from " + var(r, "profile") + ".";
        }
        const auto resp = var(r, "response");
        const auto dash = resp.find('-');
        const int idx = std::stoi(resp.substr(dash + 1));
        return nlohmann::json{{"rating", ratings.at(static_cast<std::size_t>(idx))}}.dump();
    });
}

} // namespace

TEST_CASE("default profiles") {
    const auto p = default_profiles(*bundled_templates());
    REQUIRE(p.size() == 3);
    CHECK(p[0].name == "Talkative");
    CHECK(p[1].name == "Normal");
    CHECK(p[2].name == "Quiet");
    CHECK_FALSE(p[2].prompt_fragment.empty());
}

TEST_CASE("simulate_responses") {
    auto oracle = rated({3, 3, 3});
    const auto ctx = make("c");
    const auto profs = default_profiles(*bundled_templates());
    const auto r1 = simulate_responses(ctx, profs, *oracle);
    REQUIRE(r1.size() == 3);
    CHECK(r1[0].profile == "Talkative");
    CHECK(r1[2].profile == "Quiet");
    const auto r2 = simulate_responses(ctx, profs, *oracle);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(r1[i].response == r2[i].response);
    }
    CHECK(simulate_responses(ctx, {profs[1]}, *oracle).size() == 1);
    CHECK_THROWS_AS(simulate_responses(ctx, {}, *oracle), DomainError);

    auto silent = scripted_oracle([](const PromptRequest&) { return std::string("   "); });
    CHECK_THROWS_AS(simulate_responses(ctx, profs, *silent), EmptyGeneration);
}

TEST_CASE("effectiveness is the mean") {
    CHECK(std::abs(effectiveness({0.5, 0.7, 0.6}) - 0.6) < 1e-12);
    CHECK(effectiveness({1, 1, 1}) == 1.0);
    CHECK(effectiveness({0.42}) == 0.42);
    CHECK(effectiveness({0.2, 0.9, 0.4}) == effectiveness({0.9, 0.4, 0.2}));
    CHECK_THROWS_AS(effectiveness({}), DomainError);
}

TEST_CASE("refine verdicts") {
    RefinerOptions opt;
    opt.threshold = 0.6;

    SUBCASE("exceeding the threshold is Ready") {
        // (1 + 1 + 0.75 + 0.75 + 0.5) / 5 = 0.8
        auto oracle = rated({5, 5, 4, 4, 3});
        opt.profiles = profiles(5);
        RefinementLedger ledger;
        const auto rep = refine(make("c"), opt, *oracle, ledger);
        CHECK(rep.psi == doctest::Approx(0.8).epsilon(1e-12));
        CHECK(rep.verdict == Verdict::Ready);
        CHECK(rep.cycle == 0);
        CHECK(rep.responses.size() == 5);
        CHECK(rep.responses[2].score == 0.75);
    }
    SUBCASE("equal to the threshold routes back") {
        // (0.5 + 0.5 + 0.75 + 0.75 + 0.5) / 5 = 0.6
        auto oracle = rated({3, 3, 4, 4, 3});
        opt.profiles = profiles(5);
        RefinementLedger ledger;
        const auto rep = refine(make("c"), opt, *oracle, ledger);
        CHECK(rep.psi == 0.6);
        CHECK(rep.verdict == Verdict::RouteBack);
        CHECK(rep.cycle == 1);
        CHECK(to_json(rep)["verdict"] == "RouteBack");
    }
    SUBCASE("a weak lineage is capped") {
        auto oracle = rated({2, 2, 1}); // psi = (0.25 + 0.25 + 0) / 3
        opt.profiles = profiles(3);
        opt.max_cycles = 2;
        RefinementLedger ledger;
        const auto a = refine(make("s"), opt, *oracle, ledger);
        const auto b = refine(make("s-g001-m00", {"s"}), opt, *oracle, ledger);
        const auto c = refine(make("s-g002-m01", {"s-g001-m00", "s"}), opt, *oracle, ledger);
        CHECK(a.verdict == Verdict::RouteBack);
        CHECK(a.cycle == 1);
        CHECK(b.verdict == Verdict::RouteBack);
        CHECK(b.cycle == 2);
        CHECK(c.verdict == Verdict::ReadyWithWarning);
        CHECK(c.cycle == 2);
        // Unrelated lineages start fresh.
        CHECK(refine(make("t"), opt, *oracle, ledger).verdict == Verdict::RouteBack);
    }
    SUBCASE("reports are deterministic") {
        opt.profiles = profiles(3);
        auto o1 = rated({4, 2, 5});
        auto o2 = rated({4, 2, 5});
        RefinementLedger l1;
        RefinementLedger l2;
        CHECK(to_json(refine(make("c"), opt, *o1, l1)) == to_json(refine(make("c"), opt, *o2, l2)));
    }
    SUBCASE("preconditions") {
        auto oracle = rated({3});
        RefinementLedger ledger;
        opt.profiles = profiles(1);
        opt.threshold = 1.5;
        CHECK_THROWS_AS(refine(make("c"), opt, *oracle, ledger), DomainError);
        opt.threshold = 0.5;
        opt.max_cycles = 0;
        CHECK_THROWS_AS(refine(make("c"), opt, *oracle, ledger), DomainError);
    }
}

TEST_CASE("score_creativity normalizes the rating") {
    auto oracle = scripted_oracle([](const PromptRequest&) { return std::string(R"({"rating": 4})"); });
    CHECK(score_creativity(make("c"), "resp", *oracle) == 0.75);
    auto bad = scripted_oracle([](const PromptRequest&) { return std::string(R"({"rating": 7})"); });
    CHECK_THROWS_AS(score_creativity(make("c"), "resp", *bad), ScoreParseError);
}

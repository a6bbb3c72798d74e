#include "cuecraft/errors.hpp"
#include "cuecraft/oracle.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <atomic>
#include <thread>

using namespace cuecraft;
using namespace cuecraft::testing;

TEST_CASE("normalize_likert maps 1..5 onto quarter steps") {
    CHECK(normalize_likert(1) == 0.0);
    CHECK(normalize_likert(2) == 0.25);
    CHECK(normalize_likert(3) == 0.5);
    CHECK(normalize_likert(4) == 0.75);
    CHECK(normalize_likert(5) == 1.0);
    CHECK_THROWS_AS(normalize_likert(0), DomainError);
    CHECK_THROWS_AS(normalize_likert(6), DomainError);
}

TEST_CASE("score_fragment normalizes each rating") {
    int rating[4] = {5, 5, 5, 1};
    auto oracle = scripted_oracle([&](const PromptRequest&) {
        return fragment_reply(rating[0], rating[1], rating[2], rating[3]);
    });
    auto s = oracle->score_fragment("A sentence.", "", "hint");
    CHECK(s.s_sc == 1.0);
    CHECK(s.s_im == 1.0);
    CHECK(s.s_co == 1.0);
    CHECK(s.s_ha == 0.0);

    rating[0] = rating[1] = rating[2] = rating[3] = 1;
    s = oracle->score_fragment("Another.", "", "hint");
    CHECK(s.s_sc == 0.0);
    CHECK(s.s_im == 0.0);
    CHECK(s.s_co == 0.0);
    CHECK(s.s_ha == 0.0);

    rating[0] = 4;
    rating[1] = 3;
    rating[2] = 4;
    rating[3] = 1;
    s = oracle->score_fragment("Third.", "", "hint");
    CHECK(s.s_sc == 0.75);
    CHECK(s.s_im == 0.5);
    CHECK(s.s_co == 0.75);
    CHECK(s.s_ha == 0.0);
}

TEST_CASE("malformed score reply is repaired once, then fails") {
    int calls = 0;
    auto oracle = scripted_oracle([&](const PromptRequest& r) {
        ++calls;
        return var(r, kRepairVariable).empty() ? std::string("not json") : fragment_reply(3, 3, 3, 3);
    });
    auto s = oracle->score_fragment("x.", "", "");
    CHECK(calls == 2);
    CHECK(s.s_sc == 0.5);

    auto broken = scripted_oracle([](const PromptRequest&) { return std::string("{\"cue_alignment\": 9}"); });
    CHECK_THROWS_AS(broken->score_fragment("x.", "", ""), ScoreParseError);
}

TEST_CASE("judge labels parse from the five tokens only") {
    CHECK(parse_judge_label("[[A>>B]]") == JudgeLabel::StrongA);
    CHECK(parse_judge_label("Verdict: [[A>B]]") == JudgeLabel::A);
    CHECK(parse_judge_label("[[A=B]]") == JudgeLabel::Tie);
    CHECK(parse_judge_label("[[B>A]]") == JudgeLabel::B);
    CHECK(parse_judge_label("[[B>>A]]") == JudgeLabel::StrongB);
    CHECK_THROWS_AS(parse_judge_label("A is nicer"), ReplyFormatError);
    CHECK_THROWS_AS(parse_judge_label("[[A>B]] or [[B>A]]"), ReplyFormatError);
    CHECK(swap_sides(JudgeLabel::StrongA) == JudgeLabel::StrongB);
    CHECK(swap_sides(JudgeLabel::A) == JudgeLabel::B);
    CHECK(swap_sides(JudgeLabel::Tie) == JudgeLabel::Tie);
}

TEST_CASE("judge_pair with scripted judges") {
    // Symmetric judge: identical texts tie.
    auto symmetric = scripted_oracle([](const PromptRequest& r) {
        const auto a = var(r, "context_a").size();
        const auto b = var(r, "context_b").size();
        return std::string(a > b ? "[[A>B]]" : a < b ? "[[B>A]]" : "[[A=B]]");
    });
    CHECK(symmetric->judge_pair("Same text.", "Same text.", "Coherence") == JudgeLabel::Tie);
    CHECK(symmetric->judge_pair("A much longer text here.", "Short.", "Coherence") == JudgeLabel::A);
    CHECK(symmetric->judge_pair("Short.", "A much longer text here.", "Coherence") == JudgeLabel::B);

    auto garbage = scripted_oracle([](const PromptRequest&) { return std::string("no idea"); });
    CHECK_THROWS_AS(garbage->judge_pair("a", "b", "Coherence"), ScoreParseError);
    CHECK_THROWS_AS(symmetric->judge_pair("a", "b", "Nonexistent"), TemplateError);
}

TEST_CASE("unbound placeholder never reaches the backend") {
    int calls = 0;
    auto oracle = scripted_oracle([&](const PromptRequest&) {
        ++calls;
        return std::string("x");
    });
    OracleRequest req{RequestKind::Generate, "generate_phrase", {{"title", "t"}}, {}};
    CHECK_THROWS_AS(oracle->complete(req), TemplateError);
    OracleRequest unknown{RequestKind::Generate, "no_such_template", {}, {}};
    CHECK_THROWS_AS(oracle->complete(unknown), TemplateError);
    CHECK(calls == 0);
}

TEST_CASE("fingerprint covers template, variables and seed") {
    OracleRequest a{RequestKind::Generate, "t", {{"x", "1"}, {"y", "2"}}, {0.0, 1, 7}};
    OracleRequest b = a;
    CHECK(fingerprint(a) == fingerprint(b));
    CHECK(fingerprint(a).size() == 16);
    b.variables["x"] = "other";
    CHECK(fingerprint(a) != fingerprint(b));
    b = a;
    b.sampling.seed = 8;
    CHECK(fingerprint(a) != fingerprint(b));
    b = a;
    b.template_id = "u";
    CHECK(fingerprint(a) != fingerprint(b));
}

namespace {
class FlakyBackend final : public Backend {
public:
    explicit FlakyBackend(int failures, bool retryable) : failures_(failures), retryable_(retryable) {}
    Completion complete(const PromptRequest&) override {
        if (calls++ < failures_) {
            throw TransportError("boom", retryable_);
        }
        return {"ok", 10, 2};
    }
    int calls = 0;

private:
    int failures_;
    bool retryable_;
};
} // namespace

TEST_CASE("transport failures retry with exponential backoff") {
    auto backend = std::make_shared<FlakyBackend>(2, true);
    Oracle oracle(bundled_templates(), backend, RetryPolicy{3, std::chrono::milliseconds(500)});
    std::vector<long long> sleeps;
    oracle.set_sleeper([&](std::chrono::milliseconds d) { sleeps.push_back(d.count()); });
    OracleRequest req{RequestKind::Generate, "chat_context", {{"title", "t"}, {"theme", "m"}}, {}};
    CHECK(oracle.complete(req) == "ok");
    CHECK(backend->calls == 3);
    CHECK(sleeps == std::vector<long long>{500, 1000});
    auto t = oracle.tally();
    CHECK(t.calls == 1);
    CHECK(t.completion_tokens == 2);

    auto exhausted = std::make_shared<FlakyBackend>(5, true);
    Oracle o2(bundled_templates(), exhausted);
    o2.set_sleeper([](std::chrono::milliseconds) {});
    CHECK_THROWS_AS(o2.complete(req), TransportError);
    CHECK(exhausted->calls == 3);
    CHECK(o2.tally().failed_calls == 1);

    auto fatal = std::make_shared<FlakyBackend>(5, false);
    Oracle o3(bundled_templates(), fatal);
    o3.set_sleeper([](std::chrono::milliseconds) {});
    CHECK_THROWS_AS(o3.complete(req), TransportError);
    CHECK(fatal->calls == 1);
}

TEST_CASE("oracle is safe to call concurrently") {
    std::atomic<int> calls{0};
    auto oracle = scripted_oracle([&](const PromptRequest& r) {
        ++calls;
        return var(r, "title");
    });
    std::vector<std::thread> threads;
    std::atomic<int> mismatches{0};
    for (int t = 0; t < 8; ++t) {
        threads.emplace_back([&, t] {
            for (int i = 0; i < 50; ++i) {
                const std::string title = std::to_string(t * 100 + i);
                OracleRequest req{RequestKind::Generate, "chat_context", {{"title", title}, {"theme", "m"}}, {}};
                if (oracle->complete(req) != title) {
                    ++mismatches;
                }
            }
        });
    }
    for (auto& th : threads) {
        th.join();
    }
    CHECK(mismatches == 0);
    CHECK(calls == 400);
    CHECK(oracle->call_log().size() == 400);
}

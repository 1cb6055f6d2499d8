#include <doctest.h>

#include "helpers.hpp"
#include "ownmap/chat.hpp"
#include "ownmap/errors.hpp"
#include "ownmap/prompts.hpp"
#include "ownmap/scoring.hpp"

using namespace ownmap;

namespace {

ContextBundle basic_bundle(const Roster& roster) {
    ContextBundle bundle;
    bundle.object_id = "marker";
    bundle.class_label = "marker";
    bundle.roster = &roster;
    bundle.usage.object_id = "marker";
    bundle.usage.object_name = "marker";
    bundle.usage.window_days = 365.0;
    return bundle;
}

UserUsage usage_of(const std::string& user, std::size_t total, double days_ago) {
    UserUsage u;
    u.user_id = user;
    u.total_events = total;
    u.actions["use"] = total;
    u.last_used_days_ago = days_ago;
    return u;
}

}  // namespace

TEST_CASE("share detection worked examples with the default thresholds") {
    const ShareParams defaults;

    auto shared = detect_shared(testutil::bmt_scores(0.90, 0.85, 0.10), defaults);
    CHECK(shared.kind == ShareKind::shared);
    CHECK(shared.k == 2);
    CHECK(shared.owners == std::vector<std::string>{"Bob", "Mary"});

    auto single = detect_shared(testutil::bmt_scores(0.90, 0.50, 0.10), defaults);
    CHECK(single.kind == ShareKind::single);
    CHECK(single.k == 1);
    CHECK(single.owners == std::vector<std::string>{"Bob"});

    auto none = detect_shared(testutil::bmt_scores(0.50, 0.45, 0.40), defaults);
    CHECK(none.kind == ShareKind::undetermined);
    CHECK(none.owners.empty());
}

TEST_CASE("share detection is invariant under user permutation") {
    const ShareParams defaults;
    const auto a = detect_shared(testutil::bmt_scores(0.90, 0.85, 0.10), defaults);
    const OwnershipScores permuted{{"Tom", 0.90}, {"Bob", 0.85}, {"Mary", 0.10}};
    const auto b = detect_shared(permuted, defaults);
    CHECK(a.kind == b.kind);
    CHECK(a.k == b.k);
    CHECK(b.owners == std::vector<std::string>{"Bob", "Tom"});
}

TEST_CASE("whole-roster sharing uses the implicit zero sentinel") {
    ShareParams p;
    p.eps_min = 0.8;
    p.eps_in = 0.1;
    p.eps_out = 0.2;
    const auto all = detect_shared(testutil::bmt_scores(0.95, 0.95, 0.9), p);
    CHECK(all.kind == ShareKind::shared);
    CHECK(all.k == 3);
}

TEST_CASE("uniform shifts below eps_out/2 keep the decision when margins hold") {
    ShareParams p;
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        // scores comfortably above eps_min with strict margins
        const double top = 0.9 + 0.05 * rng.uniform();
        const auto scores = testutil::bmt_scores(top, top - 0.02, 0.1);
        const auto base = detect_shared(scores, p);
        REQUIRE(base.k == 2);
        const double shift = (p.eps_out / 2.0 - 1e-6) * (rng.uniform() - 0.5) * 0.2;
        OwnershipScores shifted;
        bool valid = true;
        for (const auto& [user, s] : scores) {
            const double v = s + shift;
            if (v < p.eps_min + 1e-9 || v > 1.0) valid = false;
            shifted[user] = std::clamp(v, 0.0, 1.0);
        }
        if (!valid) continue;
        const auto moved = detect_shared(shifted, p);
        CHECK(moved.k == base.k);
    }
}

TEST_CASE("build_known starts empty and collects answers plus confident estimates") {
    const Roster roster = testutil::bmt_roster();
    MapStore map(roster);
    map.add(testutil::make_object(roster, "a", {0, 0, 0}, testutil::unit_feature(4, 0)));
    map.add(testutil::make_object(roster, "b", {1, 0, 0}, testutil::unit_feature(4, 1)));
    map.add(testutil::make_object(roster, "c", {2, 0, 0}, testutil::unit_feature(4, 2)));

    auto state = AcquisitionState::from_map(map, 10);
    CHECK(build_known(state, 0.9).empty());

    // answered object
    state.at("a").asked = true;
    state.at("a").answered = {"Bob"};
    // unasked high-confidence single
    state.at("b").scores = testutil::bmt_scores(0.95, 0.1, 0.1);
    state.at("b").share = detect_shared(state.at("b").scores, ShareParams{});
    // unasked but not confident enough
    state.at("c").scores = testutil::bmt_scores(0.85, 0.1, 0.1);
    state.at("c").share = detect_shared(state.at("c").scores, ShareParams{});

    const auto known = build_known(state, 0.9);
    REQUIRE(known.size() == 2);
    CHECK(known.at("a").provenance == FactProvenance::answered);
    CHECK(known.at("a").owners == std::vector<std::string>{"Bob"});
    CHECK(known.at("b").provenance == FactProvenance::high_confidence);
    CHECK(known.at("b").owners == std::vector<std::string>{"Bob"});
    CHECK(known.count("c") == 0);

    CHECK_THROWS_AS(build_known(state, 0.5), ValidationError);
    CHECK_THROWS_AS(build_known(state, 1.1), ValidationError);
}

TEST_CASE("heuristic score hand evaluations") {
    const Roster roster = testutil::bmt_roster();
    const HeuristicWeights weights;
    const AffinityTable flat;
    const KnownFacts none;

    SUBCASE("no events, no facts, uniform prior") {
        const auto bundle = basic_bundle(roster);
        const auto scores = heuristic_score(bundle, weights, flat, none);
        for (const auto& [user, s] : scores) {
            (void)user;
            CHECK(s == doctest::Approx(0.2));
        }
    }

    SUBCASE("sole user with fresh recency") {
        auto bundle = basic_bundle(roster);
        bundle.usage.user_summary.push_back(usage_of("Bob", 6, 0.0));
        const auto scores = heuristic_score(bundle, weights, flat, none);
        CHECK(scores.at("Bob") == doctest::Approx(0.8));
        CHECK(scores.at("Mary") == doctest::Approx(0.2));
        CHECK(scores.at("Tom") == doctest::Approx(0.2));
    }

    SUBCASE("all weight on frequency") {
        auto bundle = basic_bundle(roster);
        bundle.usage.user_summary.push_back(usage_of("Bob", 3, 0.5));
        bundle.usage.user_summary.push_back(usage_of("Mary", 1, 0.1));
        HeuristicWeights freq_only;
        freq_only.frequency = 1.0;
        freq_only.recency = 0.0;
        freq_only.prior = 0.0;
        freq_only.context = 0.0;
        const auto scores = heuristic_score(bundle, freq_only, flat, none);
        CHECK(scores.at("Bob") == doctest::Approx(0.75));
        CHECK(scores.at("Mary") == doctest::Approx(0.25));
        CHECK(scores.at("Tom") == doctest::Approx(0.0));
    }
}

TEST_CASE("heuristic scoring is a pure function") {
    const Roster roster = testutil::bmt_roster();
    auto bundle = basic_bundle(roster);
    bundle.usage.user_summary.push_back(usage_of("Bob", 4, 1.3));
    bundle.usage.user_summary.push_back(usage_of("Tom", 2, 0.2));
    KnownFacts known;
    known["other"] = KnownFact{{"Bob"}, FactProvenance::answered};
    bundle.neighbors.push_back(
        ContextEntry{"other", "thing", ContextKind::neighbor, 0.4, 0.7, 0.0, {}});

    const auto a = heuristic_score(bundle, HeuristicWeights{}, household_affinity(), known);
    const auto b = heuristic_score(bundle, HeuristicWeights{}, household_affinity(), known);
    for (const auto& [user, s] : a) CHECK(s == b.at(user));
}

TEST_CASE("ablation flags zero their terms and renormalize the rest") {
    const Roster roster = testutil::bmt_roster();
    const AffinityTable flat;
    const KnownFacts none;

    auto bundle = basic_bundle(roster);
    bundle.usage.user_summary.push_back(usage_of("Bob", 5, 0.0));
    bundle.flags.use_history = false;

    // with history disabled the frequency/recency terms vanish and the
    // prior+context weights renormalize to 0.5/0.5
    const auto scores = heuristic_score(bundle, HeuristicWeights{}, flat, none);
    for (const auto& [user, s] : scores) {
        (void)user;
        CHECK(s == doctest::Approx(0.5 * 0.5 + 0.5 * 0.5));
    }

    bundle.flags.use_history = true;
    bundle.flags.use_background = false;
    bundle.flags.use_neighbors = false;
    bundle.flags.use_similars = false;
    // only frequency+recency remain: 2/3 freq + 1/3 rec
    const auto active = heuristic_score(bundle, HeuristicWeights{}, flat, none);
    CHECK(active.at("Bob") ==
          doctest::Approx(std::clamp(2.0 / 3.0 + 1.0 / 3.0, 0.0, 1.0)));
    CHECK(active.at("Mary") == doctest::Approx(0.0));
}

TEST_CASE("context term counts fact votes over fact-bearing entries") {
    const Roster roster = testutil::bmt_roster();
    auto bundle = basic_bundle(roster);
    bundle.neighbors.push_back(
        ContextEntry{"n1", "thing", ContextKind::neighbor, 0.2, 0.9, 0.0, {}});
    bundle.neighbors.push_back(
        ContextEntry{"n2", "thing", ContextKind::neighbor, 0.4, 0.7, 0.0, {}});
    bundle.similars.push_back(
        ContextEntry{"s1", "thing", ContextKind::similar, 0.0, 0.0, 0.8, {}});

    KnownFacts known;
    known["n1"] = KnownFact{{"Bob"}, FactProvenance::answered};
    known["s1"] = KnownFact{{"Bob", "Mary"}, FactProvenance::answered};
    // n2 has no fact: two fact-bearing entries, Bob in both, Mary in one

    HeuristicWeights ctx_only;
    ctx_only.frequency = 0.0;
    ctx_only.recency = 0.0;
    ctx_only.prior = 0.0;
    ctx_only.context = 1.0;
    const auto scores = heuristic_score(bundle, ctx_only, AffinityTable{}, known);
    CHECK(scores.at("Bob") == doctest::Approx(1.0));
    CHECK(scores.at("Mary") == doctest::Approx(0.5));
    CHECK(scores.at("Tom") == doctest::Approx(0.0));
}

TEST_CASE("llm scorer parses a good reply and falls back after two bad ones") {
    const Roster roster = testutil::bmt_roster();
    const auto bundle = basic_bundle(roster);
    const KnownFacts none;

    SUBCASE("happy path") {
        auto client = std::make_shared<CallableChatClient>([](const std::string&) {
            return R"({"ownership_distribution": {"Bob": 0.9, "Mary": 0.2, "Tom": 0.1}})";
        });
        LlmScorer scorer(client, HeuristicWeights{}, AffinityTable{});
        const auto result = scorer.score(bundle, none);
        CHECK_FALSE(result.used_fallback);
        CHECK(result.scores.at("Bob") == doctest::Approx(0.9));
    }

    SUBCASE("two malformed replies trigger the heuristic fallback") {
        int calls = 0;
        auto client = std::make_shared<CallableChatClient>([&](const std::string&) {
            ++calls;
            return "I cannot answer that.";
        });
        LlmScorer scorer(client, HeuristicWeights{}, AffinityTable{});
        const auto result = scorer.score(bundle, none);
        CHECK(calls == 2);
        CHECK(result.used_fallback);
        CHECK(result.scores.at("Bob") == doctest::Approx(0.2));
    }

    SUBCASE("replay transcript serves recorded scores without a network") {
        auto transcript = std::make_shared<Transcript>();
        const std::string prompt = build_inference_prompt(bundle, none);
        transcript->put(prompt,
                        R"({"ownership_distribution": {"Bob": 0.7, "Mary": 0.3, "Tom": 0.2}})");
        LlmScorer scorer(std::make_shared<ReplayChatClient>(transcript),
                         HeuristicWeights{}, AffinityTable{});
        const auto result = scorer.score(bundle, none);
        CHECK_FALSE(result.used_fallback);
        CHECK(result.scores.at("Bob") == doctest::Approx(0.7));
        CHECK(result.scores.at("Tom") == doctest::Approx(0.2));
    }
}

TEST_CASE("attach_known decorates matching context entries") {
    std::vector<ContextEntry> entries{
        ContextEntry{"a", "thing", ContextKind::neighbor, 0.1, 0.9, 0.0, {}},
        ContextEntry{"b", "thing", ContextKind::neighbor, 0.2, 0.8, 0.0, {}}};
    KnownFacts known;
    known["a"] = KnownFact{{"Mary"}, FactProvenance::answered};
    const auto decorated = attach_known(entries, known);
    REQUIRE(decorated[0].known_ownership.has_value());
    CHECK(decorated[0].known_ownership->front() == "Mary");
    CHECK_FALSE(decorated[1].known_ownership.has_value());
}

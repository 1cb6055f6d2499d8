#include <doctest.h>
#include <json.hpp>

#include "helpers.hpp"
#include "ownmap/errors.hpp"
#include "ownmap/prompts.hpp"

using namespace ownmap;

namespace {

ContextBundle sample_bundle(const Roster& roster) {
    ContextBundle bundle;
    bundle.object_id = "marker";
    bundle.class_label = "marker";
    bundle.roster = &roster;
    bundle.neighbors.push_back(
        ContextEntry{"stapler", "stapler", ContextKind::neighbor, 0.31, 0.83, 0.0, {}});
    bundle.similars.push_back(
        ContextEntry{"crayon_box", "crayons", ContextKind::similar, 0.0, 0.0, 0.77, {}});
    bundle.usage.object_id = "marker";
    bundle.usage.object_name = "marker";
    bundle.usage.window_days = 365.0;
    UserUsage bob;
    bob.user_id = "Bob";
    bob.total_events = 5;
    bob.actions["use"] = 4;
    bob.actions["place"] = 1;
    bob.last_used_days_ago = 0.8;
    bob.example_events = {"2025-01-16 08:00 Bob is using the marker",
                          "2025-01-17 09:10 Bob puts the marker back"};
    bundle.usage.user_summary.push_back(std::move(bob));
    return bundle;
}

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
    std::size_t count = 0, pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

}  // namespace

TEST_CASE("inference prompt carries the output contract and the context slots") {
    const Roster roster = testutil::bmt_roster();
    const auto prompt = build_inference_prompt(sample_bundle(roster), {});

    CHECK(prompt.find("ownership_distribution") != std::string::npos);
    CHECK(prompt.find("You are an excellent household robot.") != std::string::npos);
    CHECK(prompt.find("- object_id: marker") != std::string::npos);
    CHECK(prompt.find("Usage History (last 365 days)") != std::string::npos);
    CHECK(prompt.find("stapler") != std::string::npos);
    CHECK(prompt.find("crayon_box") != std::string::npos);
    CHECK(prompt.find("last_used_days_ago") != std::string::npos);

    // the output-format line names each roster user exactly once
    const auto line_start = prompt.rfind("\"ownership_distribution\"");
    const std::string tail = prompt.substr(line_start);
    CHECK(count_occurrences(tail, "\"Bob\"") == 1);
    CHECK(count_occurrences(tail, "\"Mary\"") == 1);
    CHECK(count_occurrences(tail, "\"Tom\"") == 1);
}

TEST_CASE("disabled sections read 'not available'") {
    const Roster roster = testutil::bmt_roster();
    auto bundle = sample_bundle(roster);
    bundle.flags.use_history = false;
    bundle.flags.use_background = false;
    const auto prompt = build_inference_prompt(bundle, {});
    CHECK(count_occurrences(prompt, kNotAvailable) == 2);
    CHECK(prompt.find("last_used_days_ago") == std::string::npos);
    CHECK(prompt.find("office worker") == std::string::npos);
}

TEST_CASE("known ownership is embedded on matching context entries") {
    const Roster roster = testutil::bmt_roster();
    KnownFacts known;
    known["stapler"] = KnownFact{{"Bob"}, FactProvenance::answered};
    const auto prompt = build_inference_prompt(sample_bundle(roster), known);
    CHECK(prompt.find("known_ownership") != std::string::npos);
}

TEST_CASE("score responses parse with and without wrapping") {
    const Roster roster = testutil::bmt_roster();
    const std::string payload =
        R"({"ownership_distribution": {"Bob":0.9,"Mary":0.1,"Tom":0.05}})";

    SUBCASE("bare JSON") {
        const auto scores = parse_score_response(payload, roster);
        CHECK(scores.at("Bob") == doctest::Approx(0.9));
        CHECK(scores.at("Mary") == doctest::Approx(0.1));
        CHECK(scores.at("Tom") == doctest::Approx(0.05));
    }
    SUBCASE("code fence") {
        const auto scores =
            parse_score_response("```json\n" + payload + "\n```", roster);
        CHECK(scores.at("Bob") == doctest::Approx(0.9));
    }
    SUBCASE("surrounding prose") {
        const auto scores = parse_score_response(
            "Sure! Here is my estimate:\n" + payload + "\nHope that helps.", roster);
        CHECK(scores.at("Tom") == doctest::Approx(0.05));
    }
    SUBCASE("bare inner map") {
        const auto scores =
            parse_score_response(R"({"Bob":0.4,"Mary":0.5,"Tom":0.6})", roster);
        CHECK(scores.at("Mary") == doctest::Approx(0.5));
    }
}

TEST_CASE("score responses missing a user or numeric value are backend errors") {
    const Roster roster = testutil::bmt_roster();
    CHECK_THROWS_AS(parse_score_response(
                        R"({"ownership_distribution": {"Bob":0.9,"Mary":0.1}})", roster),
                    BackendError);
    CHECK_THROWS_AS(
        parse_score_response(
            R"({"ownership_distribution": {"Bob":"high","Mary":0.1,"Tom":0.2}})", roster),
        BackendError);
    CHECK_THROWS_AS(parse_score_response("no json here", roster), BackendError);

    try {
        parse_score_response("garbage", roster);
    } catch (const BackendError& e) {
        CHECK(e.raw_text() == "garbage");
    }
}

TEST_CASE("out-of-range scores are clamped") {
    const Roster roster = testutil::bmt_roster();
    const auto scores = parse_score_response(
        R"({"ownership_distribution": {"Bob":1.7,"Mary":-0.3,"Tom":0.5}})", roster);
    CHECK(scores.at("Bob") == 1.0);
    CHECK(scores.at("Mary") == 0.0);
}

TEST_CASE("score payloads round-trip exactly") {
    const Roster roster = testutil::bmt_roster();
    Rng rng(31337);
    for (int trial = 0; trial < 200; ++trial) {
        const auto scores =
            testutil::bmt_scores(rng.uniform(), rng.uniform(), rng.uniform());
        nlohmann::json payload{{"ownership_distribution", scores}};
        const auto parsed = parse_score_response(payload.dump(), roster);
        for (const auto& [user, value] : scores) CHECK(parsed.at(user) == value);
    }
}

TEST_CASE("question prompt includes the object info and score slots") {
    const Roster roster = testutil::bmt_roster();
    const auto prompt = build_question_prompt(
        "marker", "marker", {0.5, 1.5, 0.75}, roster, testutil::bmt_scores(0.6, 0.5, 0.1));
    CHECK(prompt.find("generate exactly ONE natural English question") != std::string::npos);
    CHECK(prompt.find("[Object ID]\nmarker") != std::string::npos);
    CHECK(prompt.find("P_final") != std::string::npos);
    CHECK(prompt.find("\"Bob\"") != std::string::npos);
    CHECK(prompt.find("someone else") != std::string::npos);
}

TEST_CASE("interpret prompt embeds the dialogue and parses boolean replies") {
    const Roster roster = testutil::bmt_roster();
    const auto prompt = build_interpret_prompt("Is this marker owned by Bob?",
                                               "It belongs to Bob and Mary.", roster);
    CHECK(prompt.find("ownership_boolean") != std::string::npos);
    CHECK(prompt.find("It belongs to Bob and Mary.") != std::string::npos);
    CHECK(prompt.find("shared / joint ownership is allowed") != std::string::npos);

    const auto vector = parse_bool_response(
        R"({"ownership_boolean": {"Bob":true,"Mary":true,"Tom":false}})", roster);
    CHECK(vector.at("Bob"));
    CHECK(vector.at("Mary"));
    CHECK_FALSE(vector.at("Tom"));

    CHECK_THROWS_AS(
        parse_bool_response(R"({"ownership_boolean": {"Bob":true}})", roster),
        BackendError);
    const auto stringly = parse_bool_response(
        R"({"ownership_boolean": {"Bob":"true","Mary":"false","Tom":"false"}})", roster);
    CHECK(stringly.at("Bob"));
}

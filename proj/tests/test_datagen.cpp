#include <filesystem>
#include <map>
#include <set>

#include <doctest.h>

#include "helpers.hpp"
#include "ownmap/datagen.hpp"
#include "ownmap/errors.hpp"
#include "ownmap/storage.hpp"

using namespace ownmap;
using namespace ownmap::datagen;

TEST_CASE("the bundled household spec matches the documented shape") {
    const auto spec = bundled_house34(42);
    CHECK(spec.users.size() == 3);
    CHECK(spec.objects.size() == 34);
    CHECK(spec.days == 7);

    std::map<Scenario, int> counts;
    for (const auto& obj : spec.objects) counts[obj.scenario] += 1;
    CHECK(counts[Scenario::single_user] == 10);
    CHECK(counts[Scenario::temporary_sharing] == 15);
    CHECK(counts[Scenario::multi_user_sharing] == 9);

    const auto env = generate_environment(spec);
    CHECK(env.map.size() == 34);
    CHECK(env.roster.size() == 3);
    CHECK(env.log.size() >= 2000);
    CHECK(env.log.size() <= 5000);
}

TEST_CASE("zero days still emits the map but no events") {
    auto spec = bundled_house5(3);
    spec.days = 0;
    const auto env = generate_environment(spec);
    CHECK(env.map.size() == 5);
    CHECK(env.log.empty());
}

TEST_CASE("generation is deterministic for a fixed seed") {
    const auto a = generate_environment(bundled_house5(11));
    const auto b = generate_environment(bundled_house5(11));
    REQUIRE(a.log.size() == b.log.size());
    for (std::size_t i = 0; i < a.log.size(); ++i)
        CHECK(a.log.events()[i].raw_text == b.log.events()[i].raw_text);
    for (const auto& record : a.map.objects()) {
        const auto& other = b.map.at(record.object_id);
        CHECK(record.position == other.position);
        CHECK(record.feature == other.feature);
    }

    const auto c = generate_environment(bundled_house5(12));
    bool any_difference = c.log.size() != a.log.size();
    for (std::size_t i = 0; !any_difference && i < a.log.size(); ++i)
        any_difference = a.log.events()[i].raw_text != c.log.events()[i].raw_text;
    CHECK(any_difference);
}

TEST_CASE("spec validation rejects inconsistent objects") {
    auto spec = bundled_house5(1);
    spec.objects[0].owners = {"Bob", "Mary"};  // single_user with two owners
    CHECK_THROWS_AS(spec.validate(), ValidationError);

    spec = bundled_house5(1);
    spec.objects[4].owners = {"Bob"};  // multi_user with one owner
    CHECK_THROWS_AS(spec.validate(), ValidationError);

    spec = bundled_house5(1);
    spec.objects[1].p_borrow = 1.0;
    CHECK_THROWS_AS(spec.validate(), ValidationError);

    spec = bundled_house5(1);
    spec.objects[1].owners = {"Alice"};
    CHECK_THROWS_AS(spec.validate(), ValidationError);

    spec = bundled_house5(1);
    spec.objects[1].room = "attic";
    CHECK_THROWS_AS(spec.validate(), ValidationError);
}

TEST_CASE("single-user assignment always picks the owner") {
    ObjectSpec obj;
    obj.object_id = "laptop";
    obj.owners = {"Bob"};
    obj.scenario = Scenario::single_user;
    Rng rng(5);
    std::map<std::string, std::size_t> counts;
    for (int i = 0; i < 50; ++i)
        CHECK(assign_user(obj, {"Bob", "Mary", "Tom"}, rng, counts) == "Bob");
    CHECK(counts["Bob"] == 50);
}

TEST_CASE("temporary sharing borrows at the configured rate, split evenly") {
    ObjectSpec obj;
    obj.object_id = "marker";
    obj.owners = {"Bob"};
    obj.scenario = Scenario::temporary_sharing;
    obj.p_borrow = 0.2;
    Rng rng(99);
    std::map<std::string, std::size_t> counts;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) assign_user(obj, {"Bob", "Mary", "Tom"}, rng, counts);

    const double non_owner_rate =
        static_cast<double>(counts["Mary"] + counts["Tom"]) / draws;
    CHECK(non_owner_rate == doctest::Approx(0.20).epsilon(0.1));
    CHECK(std::abs(non_owner_rate - 0.20) <= 0.02);
    CHECK(std::abs(static_cast<double>(counts["Mary"]) / draws - 0.10) <= 0.02);
    CHECK(std::abs(static_cast<double>(counts["Tom"]) / draws - 0.10) <= 0.02);
}

TEST_CASE("multi-user sharing balances cumulative usage") {
    ObjectSpec obj;
    obj.object_id = "sofa";
    obj.owners = {"Bob", "Mary"};
    obj.scenario = Scenario::multi_user_sharing;
    Rng rng(1);
    std::map<std::string, std::size_t> counts{{"Bob", 3}, {"Mary", 2}};
    CHECK(assign_user(obj, {"Bob", "Mary", "Tom"}, rng, counts) == "Mary");
    CHECK(counts["Mary"] == 3);
    // tie goes to the lexicographically first owner
    CHECK(assign_user(obj, {"Bob", "Mary", "Tom"}, rng, counts) == "Bob");
}

TEST_CASE("time split is strict with boundary events in evaluation") {
    const auto env = generate_environment(bundled_house34(21));
    const auto [train, eval] = split_by_time(env.log, 3);
    CHECK(train.size() + eval.size() == env.log.size());
    REQUIRE(!train.empty());
    REQUIRE(!eval.empty());

    const Timestamp cut = *env.log.earliest() + 3 * kSecondsPerDay;
    for (const auto& e : train.events()) CHECK(e.time < cut);
    for (const auto& e : eval.events()) CHECK(e.time >= cut);

    const auto [empty_train, all_eval] = split_by_time(env.log, 0);
    CHECK(empty_train.empty());
    CHECK(all_eval.size() == env.log.size());
}

TEST_CASE("generated sessions are single-user by construction") {
    const auto env = generate_environment(bundled_house5(17));
    for (const auto& record : env.map.objects()) {
        const auto sessions =
            segment_sessions(env.log, record.object_id, kDefaultSessionGapSeconds);
        for (const auto& session : sessions) {
            for (const std::size_t idx : session.event_indices)
                CHECK(env.log.events()[idx].user == session.user);
        }
    }
}

TEST_CASE("single-user objects see exactly one distinct user") {
    const auto env = generate_environment(bundled_house34(23));
    for (const auto& [id, scenario] : env.scenarios) {
        if (scenario != Scenario::single_user) continue;
        std::set<std::string> users;
        for (const std::size_t idx : env.log.indices_for_object(id))
            users.insert(env.log.events()[idx].user);
        CHECK(users.size() == 1);
        CHECK(*users.begin() == env.truth.at(id).front());
    }
}

TEST_CASE("feature synthesis separates classes with the promised margin") {
    for (std::uint64_t seed : {1ull, 7ull, 23ull}) {
        const auto env = generate_environment(bundled_house34(seed));
        double within_sum = 0.0, cross_sum = 0.0;
        std::size_t within_n = 0, cross_n = 0;
        const auto& objects = env.map.objects();
        for (std::size_t i = 0; i < objects.size(); ++i) {
            for (std::size_t j = i + 1; j < objects.size(); ++j) {
                double dot = 0.0;
                for (std::size_t k = 0; k < objects[i].feature.size(); ++k)
                    dot += objects[i].feature[k] * objects[j].feature[k];
                if (objects[i].class_label == objects[j].class_label) {
                    within_sum += dot;
                    ++within_n;
                } else {
                    cross_sum += dot;
                    ++cross_n;
                }
            }
        }
        REQUIRE(within_n > 0);
        const double within = within_sum / static_cast<double>(within_n);
        const double cross = cross_sum / static_cast<double>(cross_n);
        CHECK(within - cross >= 0.1);
    }
}

TEST_CASE("captions round-trip through the parser") {
    const auto env = generate_environment(bundled_house5(29));
    std::vector<std::string> lines;
    for (const auto& e : env.log.events()) lines.push_back(e.raw_text);
    ParseReport report;
    const auto parsed = parse_events(lines, env.roster, &report);
    CHECK(report.rejected.empty());
    REQUIRE(parsed.size() == env.log.size());
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        CHECK(parsed.events()[i].user == env.log.events()[i].user);
        CHECK(parsed.events()[i].object_id == env.log.events()[i].object_id);
        CHECK(parsed.events()[i].action == env.log.events()[i].action);
        CHECK(parsed.events()[i].time == env.log.events()[i].time);
    }
}

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ownmap/events.hpp"
#include "ownmap/map_store.hpp"
#include "ownmap/roster.hpp"
#include "ownmap/rng.hpp"

namespace ownmap {
namespace datagen {

enum class Scenario { single_user, temporary_sharing, multi_user_sharing };

const char* to_string(Scenario s);
std::optional<Scenario> scenario_from_string(const std::string& s);

/// One object to generate: identity, true owners, usage scenario, and
/// where it lives. Position is sampled inside the room when absent.
struct ObjectSpec {
    std::string object_id;
    std::string class_label;
    std::vector<std::string> owners;
    Scenario scenario = Scenario::single_user;
    double p_borrow = 0.2;  // temporary_sharing only
    std::string room;
    std::optional<std::array<double, 3>> position;
};

/// Full generation recipe. Defaults follow the documented generator
/// parameters; the bundled household spec overrides the session rates to
/// land in the expected event-count range.
struct ScenarioSpec {
    std::vector<UserProfile> users;
    std::vector<ObjectSpec> objects;
    std::map<std::string, std::array<double, 3>> rooms;  // room -> center
    int days = 7;
    int day_start_minute = 6 * 60;    // 06:00
    int day_end_minute = 23 * 60;     // 23:00
    int sessions_per_day_min = 1;
    int sessions_per_day_max = 3;
    int events_per_session_min = 1;
    int events_per_session_max = 4;
    std::size_t feature_dim = 512;
    std::string start_date = "2025-01-13";
    std::uint64_t seed = 1;

    /// Throws ValidationError on scenario/owner-count mismatches,
    /// out-of-range probabilities, or unknown rooms.
    void validate() const;
};

using GroundTruth = std::map<std::string, std::vector<std::string>>;

struct Environment {
    MapStore map;
    EventLog log;
    GroundTruth truth;
    Roster roster;
    std::map<std::string, Scenario> scenarios;  // object id -> category
};

/// Deterministically expands the spec into a map, an event log, ground
/// truth, and the roster. Same spec + seed always yields byte-identical
/// data; every object draws from its own derived stream.
Environment generate_environment(const ScenarioSpec& spec);

/// Draws the acting user for one session according to the scenario rule:
/// single_user always picks the owner; temporary_sharing borrows with
/// probability p_borrow split evenly over non-owners; multi_user_sharing
/// picks the least-used owner (name ascending on ties). Increments the
/// winner's usage count.
std::string assign_user(const ObjectSpec& object,
                        const std::vector<std::string>& all_users,
                        Rng& rng,
                        std::map<std::string, std::size_t>& usage_counts);

/// Chronological split at earliest + train_days * 24h. Boundary events go
/// to the evaluation half.
std::pair<EventLog, EventLog> split_by_time(const EventLog& log, int train_days);

/// The bundled 34-object, 3-user household spec (10 single_user /
/// 15 temporary_sharing / 9 multi_user_sharing, 7 days, 06:00-23:00).
ScenarioSpec bundled_house34(std::uint64_t seed = 1);

/// Small 5-object, 3-user spec for end-to-end transcript tests and demos.
ScenarioSpec bundled_house5(std::uint64_t seed = 1);

}  // namespace datagen
}  // namespace ownmap

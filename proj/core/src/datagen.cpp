#include "ownmap/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ownmap/errors.hpp"

namespace ownmap {
namespace datagen {

const char* to_string(Scenario s) {
    switch (s) {
        case Scenario::single_user: return "single_user";
        case Scenario::temporary_sharing: return "temporary_sharing";
        case Scenario::multi_user_sharing: return "multi_user_sharing";
    }
    return "single_user";
}

std::optional<Scenario> scenario_from_string(const std::string& s) {
    if (s == "single_user") return Scenario::single_user;
    if (s == "temporary_sharing") return Scenario::temporary_sharing;
    if (s == "multi_user_sharing") return Scenario::multi_user_sharing;
    return std::nullopt;
}

void ScenarioSpec::validate() const {
    if (users.size() < 2)
        throw ValidationError("spec: at least 2 users required");
    if (days < 0) throw ValidationError("spec: days must be non-negative");
    if (day_start_minute < 0 || day_end_minute > 24 * 60 ||
        day_start_minute >= day_end_minute)
        throw ValidationError("spec: daily window is invalid");
    if (sessions_per_day_min < 1 || sessions_per_day_min > sessions_per_day_max)
        throw ValidationError("spec: sessions_per_day range is invalid");
    if (events_per_session_min < 1 || events_per_session_min > events_per_session_max)
        throw ValidationError("spec: events_per_session range is invalid");
    if (feature_dim < 2) throw ValidationError("spec: feature_dim must be at least 2");
    if (!parse_timestamp(start_date + " 00:00"))
        throw ValidationError("spec: start_date must be YYYY-MM-DD");

    std::vector<std::string> names;
    for (const auto& u : users) names.push_back(u.name);

    std::vector<std::string> seen_ids;
    for (const auto& obj : objects) {
        if (obj.object_id.empty())
            throw ValidationError("spec: object with empty id");
        if (std::find(seen_ids.begin(), seen_ids.end(), obj.object_id) != seen_ids.end())
            throw ValidationError("spec: duplicate object id '" + obj.object_id + "'");
        seen_ids.push_back(obj.object_id);

        if (obj.owners.empty())
            throw ValidationError("spec: object '" + obj.object_id + "' has no owners");
        for (const auto& owner : obj.owners)
            if (std::find(names.begin(), names.end(), owner) == names.end())
                throw ValidationError("spec: object '" + obj.object_id +
                                      "' owner '" + owner + "' not in user list");

        if (obj.scenario == Scenario::single_user && obj.owners.size() != 1)
            throw ValidationError("spec: single_user object '" + obj.object_id +
                                  "' must have exactly one owner");
        if (obj.scenario == Scenario::multi_user_sharing && obj.owners.size() < 2)
            throw ValidationError("spec: multi_user_sharing object '" + obj.object_id +
                                  "' must have at least two owners");
        if (obj.p_borrow < 0.0 || obj.p_borrow >= 1.0)
            throw ValidationError("spec: object '" + obj.object_id +
                                  "' p_borrow must lie in [0,1)");
        if (!obj.position && !rooms.count(obj.room))
            throw ValidationError("spec: object '" + obj.object_id +
                                  "' has no position and unknown room '" + obj.room + "'");
    }
}

namespace {

std::vector<double> unit_gaussian(Rng rng, std::size_t dim) {
    std::vector<double> v(dim);
    double norm2 = 0.0;
    for (auto& x : v) {
        x = rng.normal();
        norm2 += x * x;
    }
    const double norm = std::sqrt(norm2);
    for (auto& x : v) x /= norm;
    return v;
}

std::vector<double> make_feature(const ScenarioSpec& spec, const ObjectSpec& obj,
                                 Rng& rng) {
    // class base + owner offset + noise, each a unit direction; scales
    // chosen so same-class cosine stays well above cross-class (the
    // separation the similarity cue needs).
    std::string owner_key;
    std::vector<std::string> sorted_owners = obj.owners;
    std::sort(sorted_owners.begin(), sorted_owners.end());
    for (const auto& o : sorted_owners) owner_key += o + ",";

    Rng class_rng(spec.seed ^ fnv1a64("class:" + obj.class_label));
    Rng owner_rng(spec.seed ^ fnv1a64("owners:" + owner_key));
    const auto base = unit_gaussian(class_rng, spec.feature_dim);
    const auto owner = unit_gaussian(owner_rng, spec.feature_dim);
    const auto noise = unit_gaussian(rng.derive("feature_noise"), spec.feature_dim);

    std::vector<double> f(spec.feature_dim);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        f[i] = base[i] + 0.4 * owner[i] + 0.25 * noise[i];
        norm2 += f[i] * f[i];
    }
    const double norm = std::sqrt(norm2);
    for (auto& x : f) x /= norm;
    return f;
}

struct CaptionContext {
    const ObjectSpec* object;
    std::string room;
};

std::string render_caption(Timestamp t, const std::string& user, ActionType action,
                           const CaptionContext& ctx) {
    std::ostringstream out;
    out << format_timestamp(t) << " " << user << " ";
    switch (action) {
        case ActionType::use: out << "takes the " << ctx.object->object_id; break;
        case ActionType::place: out << "puts the " << ctx.object->object_id << " back"; break;
        case ActionType::transport:
            out << "carries the " << ctx.object->object_id << " to the " << ctx.room;
            break;
        case ActionType::clean: out << "cleans the " << ctx.object->object_id; break;
        case ActionType::search: out << "looks for the " << ctx.object->object_id; break;
        case ActionType::other: out << "is using the " << ctx.object->object_id; break;
    }
    return out.str();
}

}  // namespace

std::string assign_user(const ObjectSpec& object,
                        const std::vector<std::string>& all_users,
                        Rng& rng,
                        std::map<std::string, std::size_t>& usage_counts) {
    std::string chosen;
    switch (object.scenario) {
        case Scenario::single_user:
            chosen = object.owners.front();
            break;
        case Scenario::temporary_sharing: {
            std::vector<std::string> non_owners;
            for (const auto& u : all_users)
                if (std::find(object.owners.begin(), object.owners.end(), u) ==
                    object.owners.end())
                    non_owners.push_back(u);
            const bool borrow = !non_owners.empty() && rng.uniform() < object.p_borrow;
            if (borrow) {
                chosen = non_owners[static_cast<std::size_t>(
                    rng.uniform_int(0, static_cast<std::int64_t>(non_owners.size()) - 1))];
            } else {
                chosen = object.owners[static_cast<std::size_t>(rng.uniform_int(
                    0, static_cast<std::int64_t>(object.owners.size()) - 1))];
            }
            break;
        }
        case Scenario::multi_user_sharing: {
            std::vector<std::string> owners = object.owners;
            std::sort(owners.begin(), owners.end());
            std::size_t best_count = static_cast<std::size_t>(-1);
            for (const auto& owner : owners) {
                const std::size_t count =
                    usage_counts.count(owner) ? usage_counts.at(owner) : 0;
                if (count < best_count) {
                    best_count = count;
                    chosen = owner;
                }
            }
            break;
        }
    }
    usage_counts[chosen] += 1;
    return chosen;
}

Environment generate_environment(const ScenarioSpec& spec) {
    spec.validate();

    Environment env;
    for (const auto& user : spec.users) env.roster.add(user);
    env.map = MapStore(env.roster);

    const Rng root(spec.seed);
    const Timestamp t0 = *parse_timestamp(spec.start_date + " 00:00");
    const std::vector<std::string> user_names = env.roster.names();

    for (const auto& obj : spec.objects) {
        Rng rng = root.derive("obj:" + obj.object_id);

        ObjectRecord record;
        record.object_id = obj.object_id;
        record.class_label = obj.class_label;
        if (obj.position) {
            record.position = *obj.position;
        } else {
            const auto& center = spec.rooms.at(obj.room);
            record.position = {center[0] + (rng.uniform() - 0.5) * 1.2,
                               center[1] + (rng.uniform() - 0.5) * 1.2,
                               center[2] + (rng.uniform() - 0.5) * 0.5};
        }
        record.feature = make_feature(spec, obj, rng);
        record.scores = zero_scores(env.roster);
        env.map.add(std::move(record));

        env.truth[obj.object_id] = obj.owners;
        env.scenarios[obj.object_id] = obj.scenario;

        CaptionContext ctx{&obj, obj.room.empty() ? "room" : obj.room};
        std::map<std::string, std::size_t> usage_counts;

        for (int day = 0; day < spec.days; ++day) {
            const int n_sessions = static_cast<int>(
                rng.uniform_int(spec.sessions_per_day_min, spec.sessions_per_day_max));
            const int window = spec.day_end_minute - spec.day_start_minute;
            const int slot = window / std::max(1, n_sessions);
            for (int s = 0; s < n_sessions; ++s) {
                const std::string user = assign_user(obj, user_names, rng, usage_counts);
                const int n_events = static_cast<int>(rng.uniform_int(
                    spec.events_per_session_min, spec.events_per_session_max));

                const int slot_begin = spec.day_start_minute + s * slot;
                const int max_span = (n_events - 1) * 8;
                const int latest_start =
                    std::max(slot_begin, slot_begin + slot - 1 - max_span);
                const int start_minute = static_cast<int>(
                    rng.uniform_int(slot_begin, latest_start));

                Timestamp t = t0 + static_cast<Timestamp>(day) * kSecondsPerDay +
                              static_cast<Timestamp>(start_minute) * 60;
                for (int e = 0; e < n_events; ++e) {
                    ActionType action;
                    if (e == 0) {
                        action = ActionType::use;
                    } else if (e == n_events - 1) {
                        action = ActionType::place;
                    } else {
                        const double r = rng.uniform();
                        if (r < 0.70) action = ActionType::other;      // "is using"
                        else if (r < 0.80) action = ActionType::clean;
                        else if (r < 0.90) action = ActionType::transport;
                        else action = ActionType::search;
                    }

                    Event event;
                    event.time = t;
                    event.user = user;
                    event.action = action == ActionType::other ? ActionType::use : action;
                    event.object_id = obj.object_id;
                    event.raw_text = render_caption(t, user, action, ctx);
                    env.log.add(std::move(event));

                    t += rng.uniform_int(2, 8) * 60;
                }
            }
        }
    }

    env.log.freeze();
    return env;
}

std::pair<EventLog, EventLog> split_by_time(const EventLog& log, int train_days) {
    if (train_days < 0)
        throw ValidationError("split: train_days must be non-negative");
    EventLog train, eval;
    if (!log.empty()) {
        const Timestamp cut =
            *log.earliest() + static_cast<Timestamp>(train_days) * kSecondsPerDay;
        for (const auto& event : log.events()) {
            if (event.time < cut) train.add(event);
            else eval.add(event);  // boundary events go to evaluation
        }
    }
    train.freeze();
    eval.freeze();
    return {std::move(train), std::move(eval)};
}

namespace {

ObjectSpec make_object(std::string id, std::string class_label,
                       std::vector<std::string> owners, Scenario scenario,
                       std::string room, double p_borrow = 0.2) {
    ObjectSpec obj;
    obj.object_id = std::move(id);
    obj.class_label = std::move(class_label);
    obj.owners = std::move(owners);
    obj.scenario = scenario;
    obj.room = std::move(room);
    obj.p_borrow = p_borrow;
    return obj;
}

}  // namespace

ScenarioSpec bundled_house34(std::uint64_t seed) {
    ScenarioSpec spec;
    spec.seed = seed;
    spec.days = 7;
    spec.sessions_per_day_min = 2;
    spec.sessions_per_day_max = 4;
    spec.events_per_session_min = 3;
    spec.events_per_session_max = 6;
    spec.feature_dim = 512;
    spec.start_date = "2025-01-13";

    spec.users = {
        {"Bob", "father", "office worker"},
        {"Mary", "mother", "homemaker"},
        {"Tom", "son", "elementary school student"},
    };

    spec.rooms = {
        {"study", {0.0, 0.0, 0.7}},        {"bedroom", {3.0, 0.0, 0.5}},
        {"bathroom", {6.0, 0.0, 0.9}},     {"living_room", {0.0, 3.0, 0.4}},
        {"hallway", {3.0, 3.0, 0.5}},      {"dining_room", {6.0, 3.0, 0.75}},
        {"kitchen", {0.0, 6.0, 0.9}},      {"kids_room", {3.0, 6.0, 0.5}},
    };

    using S = Scenario;
    auto& o = spec.objects;
    // exclusively owned
    o.push_back(make_object("laptop", "laptop", {"Bob"}, S::single_user, "study"));
    o.push_back(make_object("briefcase", "briefcase", {"Bob"}, S::single_user, "study"));
    o.push_back(make_object("toothbrush_blue", "toothbrush", {"Bob"}, S::single_user, "bathroom"));
    o.push_back(make_object("apron", "apron", {"Mary"}, S::single_user, "kitchen"));
    o.push_back(make_object("recipe_book", "book", {"Mary"}, S::single_user, "kitchen"));
    o.push_back(make_object("knitting_kit", "craft_kit", {"Mary"}, S::single_user, "living_room"));
    o.push_back(make_object("toy_car", "toy", {"Tom"}, S::single_user, "kids_room"));
    o.push_back(make_object("teddy_bear", "toy", {"Tom"}, S::single_user, "kids_room"));
    o.push_back(make_object("crayon_box", "crayons", {"Tom"}, S::single_user, "kids_room"));
    o.push_back(make_object("school_backpack", "backpack", {"Tom"}, S::single_user, "kids_room"));
    // owned but occasionally borrowed
    o.push_back(make_object("marker", "marker", {"Bob"}, S::temporary_sharing, "study"));
    o.push_back(make_object("stapler", "stapler", {"Bob"}, S::temporary_sharing, "study"));
    o.push_back(make_object("headphones", "headphones", {"Bob"}, S::temporary_sharing, "study"));
    o.push_back(make_object("phone_charger", "charger", {"Bob"}, S::temporary_sharing, "bedroom"));
    o.push_back(make_object("calculator", "calculator", {"Bob"}, S::temporary_sharing, "study"));
    o.push_back(make_object("flashlight", "flashlight", {"Bob"}, S::temporary_sharing, "hallway"));
    o.push_back(make_object("hand_cream", "cosmetics", {"Mary"}, S::temporary_sharing, "bedroom"));
    o.push_back(make_object("scissors", "scissors", {"Mary"}, S::temporary_sharing, "kitchen"));
    o.push_back(make_object("umbrella_red", "umbrella", {"Mary"}, S::temporary_sharing, "hallway"));
    o.push_back(make_object("magazine", "magazine", {"Mary"}, S::temporary_sharing, "living_room"));
    o.push_back(make_object("gardening_gloves", "gloves", {"Mary"}, S::temporary_sharing, "hallway"));
    o.push_back(make_object("tablet", "tablet", {"Tom"}, S::temporary_sharing, "living_room"));
    o.push_back(make_object("storybook", "book", {"Tom"}, S::temporary_sharing, "kids_room"));
    o.push_back(make_object("water_bottle", "bottle", {"Tom"}, S::temporary_sharing, "kitchen"));
    o.push_back(make_object("puzzle_box", "puzzle", {"Tom"}, S::temporary_sharing, "living_room"));
    // genuinely shared
    o.push_back(make_object("sofa", "sofa", {"Bob", "Mary", "Tom"}, S::multi_user_sharing, "living_room"));
    o.push_back(make_object("dining_table", "table", {"Bob", "Mary", "Tom"}, S::multi_user_sharing, "dining_room"));
    o.push_back(make_object("tv_remote", "remote", {"Bob", "Mary", "Tom"}, S::multi_user_sharing, "living_room"));
    o.push_back(make_object("board_game", "game", {"Bob", "Mary", "Tom"}, S::multi_user_sharing, "living_room"));
    o.push_back(make_object("coffee_maker", "appliance", {"Bob", "Mary"}, S::multi_user_sharing, "kitchen"));
    o.push_back(make_object("family_album", "album", {"Bob", "Mary"}, S::multi_user_sharing, "living_room"));
    o.push_back(make_object("first_aid_kit", "kit", {"Bob", "Mary"}, S::multi_user_sharing, "bathroom"));
    o.push_back(make_object("vacuum_cleaner", "appliance", {"Bob", "Mary"}, S::multi_user_sharing, "hallway"));
    o.push_back(make_object("picnic_basket", "basket", {"Bob", "Mary", "Tom"}, S::multi_user_sharing, "hallway"));
    return spec;
}

ScenarioSpec bundled_house5(std::uint64_t seed) {
    ScenarioSpec spec;
    spec.seed = seed;
    spec.days = 3;
    spec.feature_dim = 64;
    spec.start_date = "2025-01-13";

    spec.users = {
        {"Bob", "father", "office worker"},
        {"Mary", "mother", "homemaker"},
        {"Tom", "son", "elementary school student"},
    };
    spec.rooms = {
        {"study", {0.0, 0.0, 0.7}},
        {"kitchen", {0.0, 6.0, 0.9}},
        {"kids_room", {3.0, 6.0, 0.5}},
    };

    using S = Scenario;
    auto& o = spec.objects;
    o.push_back(make_object("laptop", "laptop", {"Bob"}, S::single_user, "study"));
    o.push_back(make_object("marker", "marker", {"Bob"}, S::temporary_sharing, "study"));
    o.push_back(make_object("teddy_bear", "toy", {"Tom"}, S::single_user, "kids_room"));
    o.push_back(make_object("scissors", "scissors", {"Mary"}, S::temporary_sharing, "kitchen"));
    o.push_back(make_object("coffee_maker", "appliance", {"Bob", "Mary"}, S::multi_user_sharing, "kitchen"));
    return spec;
}

}  // namespace datagen
}  // namespace ownmap

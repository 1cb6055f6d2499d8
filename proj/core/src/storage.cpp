#include "ownmap/storage.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ownmap/errors.hpp"

namespace ownmap {
namespace storage {

using nlohmann::json;

namespace {

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    json parsed = json::parse(in, nullptr, false);
    if (parsed.is_discarded())
        throw ValidationError("malformed JSON in " + path.string());
    return parsed;
}

void write_json(const json& value, const std::filesystem::path& path) {
    write_text(path, value.dump(2) + "\n");
}

json share_to_json(const ShareDecision& share) {
    return json{{"kind", to_string(share.kind)},
                {"owners", share.owners},
                {"k", share.k}};
}

ShareDecision share_from_json(const json& value) {
    ShareDecision share;
    const std::string kind = value.value("kind", "undetermined");
    if (kind == "single") share.kind = ShareKind::single;
    else if (kind == "shared") share.kind = ShareKind::shared;
    else share.kind = ShareKind::undetermined;
    if (value.contains("owners"))
        share.owners = value.at("owners").get<std::vector<std::string>>();
    share.k = value.value("k", share.owners.size());
    return share;
}

json metrics_to_json(const MetricsReport& report) {
    json out{{"subset_accuracy", report.subset_accuracy},
             {"mean_jaccard", report.mean_jaccard},
             {"micro_precision", report.micro_precision},
             {"micro_recall", report.micro_recall},
             {"micro_f1", report.micro_f1},
             {"n_samples", report.n_samples},
             {"n_questions", report.n_questions}};
    if (!report.per_category.empty()) {
        json cats = json::object();
        for (const auto& [name, sub] : report.per_category)
            cats[name] = metrics_to_json(sub);
        out["per_category"] = std::move(cats);
    }
    return out;
}

MetricsReport metrics_from_json(const json& value) {
    MetricsReport report;
    report.subset_accuracy = value.value("subset_accuracy", 0.0);
    report.mean_jaccard = value.value("mean_jaccard", 0.0);
    report.micro_precision = value.value("micro_precision", 0.0);
    report.micro_recall = value.value("micro_recall", 0.0);
    report.micro_f1 = value.value("micro_f1", 0.0);
    report.n_samples = value.value("n_samples", std::size_t{0});
    report.n_questions = value.value("n_questions", std::size_t{0});
    if (value.contains("per_category"))
        for (const auto& [name, sub] : value.at("per_category").items())
            report.per_category[name] = metrics_from_json(sub);
    return report;
}

json snapshot_to_json(const StateSnapshot& snapshot) {
    json out = json::object();
    for (const auto& [id, entry] : snapshot) {
        out[id] = {{"predicted", entry.predicted},
                   {"asked", entry.asked},
                   {"needs_revisit", entry.needs_revisit}};
    }
    return out;
}

StateSnapshot snapshot_from_json(const json& value) {
    StateSnapshot snapshot;
    for (const auto& [id, entry] : value.items()) {
        SnapshotEntry e;
        for (const auto& name : entry.at("predicted"))
            e.predicted.insert(name.get<std::string>());
        e.asked = entry.value("asked", false);
        e.needs_revisit = entry.value("needs_revisit", false);
        snapshot[id] = std::move(e);
    }
    return snapshot;
}

double mean_of(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double stddev_of(const std::vector<double>& values) {
    if (values.size() < 2) return 0.0;
    const double mean = mean_of(values);
    double sum = 0.0;
    for (double v : values) sum += (v - mean) * (v - mean);
    return std::sqrt(sum / static_cast<double>(values.size() - 1));
}

}  // namespace

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    if (!out) throw IoError("write failed for " + path.string());
}

Roster load_roster(const std::filesystem::path& path) {
    const json doc = load_json(path);
    if (!doc.contains("users") || !doc.at("users").is_array())
        throw ValidationError(path.string() + ": expected a top-level 'users' array");
    Roster roster;
    for (const auto& user : doc.at("users")) {
        roster.add(UserProfile{user.value("name", ""), user.value("role", ""),
                               user.value("occupation", "")});
    }
    if (roster.size() < 2)
        throw ValidationError(path.string() + ": a roster needs at least 2 users");
    return roster;
}

void save_roster(const Roster& roster, const std::filesystem::path& path) {
    if (roster.size() < 2)
        throw ValidationError("roster: at least 2 users required to persist");
    json users = json::array();
    for (const auto& user : roster.users())
        users.push_back({{"name", user.name},
                         {"role", user.role},
                         {"occupation", user.occupation}});
    write_json(json{{"users", users}}, path);
}

MapStore load_map(const std::filesystem::path& path, const Roster& roster) {
    const json doc = load_json(path);
    if (!doc.contains("objects") || !doc.at("objects").is_array())
        throw ValidationError(path.string() + ": expected a top-level 'objects' array");

    MapStore map(roster);
    for (const auto& item : doc.at("objects")) {
        ObjectRecord record;
        record.object_id = item.value("object_id", "");
        record.class_label = item.value("class", "");
        if (item.contains("position")) {
            const auto& pos = item.at("position");
            if (!pos.is_array() || pos.size() != 3)
                throw ValidationError("map: object '" + record.object_id +
                                      "' position must be [x, y, z]");
            for (std::size_t i = 0; i < 3; ++i) record.position[i] = pos[i].get<double>();
        }
        if (!item.contains("feature"))
            throw ValidationError("map: object '" + record.object_id +
                                  "' is missing its feature vector");
        record.feature = item.at("feature").get<std::vector<double>>();
        if (item.contains("scores"))
            record.scores = item.at("scores").get<OwnershipScores>();
        if (item.contains("share")) record.share = share_from_json(item.at("share"));
        record.asked = item.value("asked", false);
        // "owners" (ground truth) is legal in the format but lives in the
        // truth file for generated datasets; the loader tolerates it.
        map.add(std::move(record));
    }
    return map;
}

void save_map(const MapStore& map, const std::filesystem::path& path) {
    json objects = json::array();
    for (const auto& record : map.objects()) {
        json item;
        item["object_id"] = record.object_id;
        item["class"] = record.class_label;
        item["position"] = record.position;
        item["feature"] = record.feature;
        item["scores"] = record.scores;
        item["share"] = share_to_json(record.share);
        item["asked"] = record.asked;
        objects.push_back(std::move(item));
    }
    write_json(json{{"objects", objects}}, path);
}

EventLog load_events_text(const std::filesystem::path& path,
                          const Roster& roster,
                          ParseReport* report) {
    return parse_events(read_lines(path), roster, report);
}

void save_events_text(const EventLog& log, const std::filesystem::path& path) {
    std::ostringstream out;
    for (const auto& event : log.events()) out << event.raw_text << "\n";
    write_text(path, out.str());
}

EventLog load_events_jsonl(const std::filesystem::path& path) {
    EventLog log;
    std::size_t line_number = 0;
    for (const auto& line : read_lines(path)) {
        ++line_number;
        if (line.empty()) continue;
        json item = json::parse(line, nullptr, false);
        if (item.is_discarded())
            throw ValidationError(path.string() + ":" + std::to_string(line_number) +
                                  ": malformed JSON record");
        Event event;
        const auto time = parse_timestamp(item.value("time", ""));
        if (!time)
            throw ValidationError(path.string() + ":" + std::to_string(line_number) +
                                  ": malformed time");
        event.time = *time;
        event.user = item.value("user", "");
        const auto action = action_from_string(item.value("action", "other"));
        event.action = action.value_or(ActionType::other);
        event.object_id = item.value("object_id", "");
        event.raw_text = item.value("raw_text", "");
        event.unknown_user = item.value("unknown_user", false);
        log.add(std::move(event));
    }
    log.freeze();
    return log;
}

void save_events_jsonl(const EventLog& log, const std::filesystem::path& path) {
    std::ostringstream out;
    for (const auto& event : log.events()) {
        json item{{"time", format_timestamp(event.time)},
                  {"user", event.user},
                  {"action", to_string(event.action)},
                  {"object_id", event.object_id},
                  {"raw_text", event.raw_text},
                  {"unknown_user", event.unknown_user}};
        out << item.dump() << "\n";
    }
    write_text(path, out.str());
}

TruthFile load_truth(const std::filesystem::path& path) {
    const json doc = load_json(path);
    if (!doc.contains("objects") || !doc.at("objects").is_object())
        throw ValidationError(path.string() + ": expected a top-level 'objects' map");
    TruthFile out;
    for (const auto& [id, entry] : doc.at("objects").items()) {
        TruthEntry truth;
        for (const auto& owner : entry.at("owners"))
            truth.owners.insert(owner.get<std::string>());
        if (truth.owners.empty())
            throw ValidationError(path.string() + ": object '" + id +
                                  "' has an empty owner set");
        truth.scenario = entry.value("scenario", "");
        out.truth[id] = std::move(truth);
    }
    return out;
}

void save_truth(const datagen::GroundTruth& truth,
                const std::map<std::string, datagen::Scenario>& scenarios,
                const std::filesystem::path& path) {
    json objects = json::object();
    for (const auto& [id, owners] : truth) {
        json entry{{"owners", owners}};
        auto it = scenarios.find(id);
        if (it != scenarios.end()) entry["scenario"] = datagen::to_string(it->second);
        objects[id] = std::move(entry);
    }
    write_json(json{{"objects", objects}}, path);
}

void save_truth_map(const TruthMap& truth, const std::filesystem::path& path) {
    json objects = json::object();
    for (const auto& [id, entry] : truth) {
        json item{{"owners", entry.owners}};
        if (!entry.scenario.empty()) item["scenario"] = entry.scenario;
        objects[id] = std::move(item);
    }
    write_json(json{{"objects", objects}}, path);
}

namespace {

std::string minute_label(int minute_of_day) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%02d:%02d", minute_of_day / 60, minute_of_day % 60);
    return buf;
}

int minute_from_label(const std::string& label) {
    int h = 0, m = 0;
    if (std::sscanf(label.c_str(), "%d:%d", &h, &m) != 2 || h < 0 || h > 24 || m < 0 ||
        m > 59)
        throw ValidationError("spec: bad daily window time '" + label + "'");
    return h * 60 + m;
}

}  // namespace

datagen::ScenarioSpec load_spec(const std::filesystem::path& path) {
    const json doc = load_json(path);
    datagen::ScenarioSpec spec;
    spec.seed = doc.value("seed", std::uint64_t{1});
    spec.days = doc.value("days", 7);
    spec.start_date = doc.value("start_date", std::string{"2025-01-13"});
    if (doc.contains("daily_window")) {
        const auto& window = doc.at("daily_window");
        spec.day_start_minute = minute_from_label(window.at(0).get<std::string>());
        spec.day_end_minute = minute_from_label(window.at(1).get<std::string>());
    }
    if (doc.contains("sessions_per_day")) {
        spec.sessions_per_day_min = doc.at("sessions_per_day").at(0).get<int>();
        spec.sessions_per_day_max = doc.at("sessions_per_day").at(1).get<int>();
    }
    if (doc.contains("events_per_session")) {
        spec.events_per_session_min = doc.at("events_per_session").at(0).get<int>();
        spec.events_per_session_max = doc.at("events_per_session").at(1).get<int>();
    }
    spec.feature_dim = doc.value("feature_dim", std::size_t{512});

    if (doc.contains("users"))
        for (const auto& user : doc.at("users"))
            spec.users.push_back(UserProfile{user.value("name", ""),
                                             user.value("role", ""),
                                             user.value("occupation", "")});
    if (doc.contains("rooms"))
        for (const auto& [name, center] : doc.at("rooms").items())
            spec.rooms[name] = {center.at(0).get<double>(), center.at(1).get<double>(),
                                center.at(2).get<double>()};
    if (doc.contains("objects")) {
        for (const auto& item : doc.at("objects")) {
            datagen::ObjectSpec obj;
            obj.object_id = item.value("object_id", "");
            obj.class_label = item.value("class", "");
            if (item.contains("owners"))
                obj.owners = item.at("owners").get<std::vector<std::string>>();
            const auto scenario =
                datagen::scenario_from_string(item.value("scenario", "single_user"));
            if (!scenario)
                throw ValidationError("spec: object '" + obj.object_id +
                                      "' has an unknown scenario");
            obj.scenario = *scenario;
            obj.p_borrow = item.value("p_borrow", 0.2);
            obj.room = item.value("room", "");
            if (item.contains("position")) {
                const auto& pos = item.at("position");
                obj.position = std::array<double, 3>{pos.at(0).get<double>(),
                                                     pos.at(1).get<double>(),
                                                     pos.at(2).get<double>()};
            }
            spec.objects.push_back(std::move(obj));
        }
    }
    spec.validate();
    return spec;
}

void save_spec(const datagen::ScenarioSpec& spec, const std::filesystem::path& path) {
    json doc;
    doc["seed"] = spec.seed;
    doc["days"] = spec.days;
    doc["start_date"] = spec.start_date;
    doc["daily_window"] = {minute_label(spec.day_start_minute),
                           minute_label(spec.day_end_minute)};
    doc["sessions_per_day"] = {spec.sessions_per_day_min, spec.sessions_per_day_max};
    doc["events_per_session"] = {spec.events_per_session_min, spec.events_per_session_max};
    doc["feature_dim"] = spec.feature_dim;

    json users = json::array();
    for (const auto& user : spec.users)
        users.push_back({{"name", user.name},
                         {"role", user.role},
                         {"occupation", user.occupation}});
    doc["users"] = std::move(users);

    json rooms = json::object();
    for (const auto& [name, center] : spec.rooms) rooms[name] = center;
    doc["rooms"] = std::move(rooms);

    json objects = json::array();
    for (const auto& obj : spec.objects) {
        json item;
        item["object_id"] = obj.object_id;
        item["class"] = obj.class_label;
        item["owners"] = obj.owners;
        item["scenario"] = datagen::to_string(obj.scenario);
        if (obj.scenario == datagen::Scenario::temporary_sharing)
            item["p_borrow"] = obj.p_borrow;
        if (!obj.room.empty()) item["room"] = obj.room;
        if (obj.position) item["position"] = *obj.position;
        objects.push_back(std::move(item));
    }
    doc["objects"] = std::move(objects);
    write_json(doc, path);
}

CalibrationModel load_calibration(const std::filesystem::path& path) {
    const json doc = load_json(path);
    CalibrationModel model;
    model.alpha = doc.value("alpha", 0.2);
    model.q_alpha = doc.value("q_alpha", 0.0);
    model.alpha_cp = doc.value("alpha_cp", 0.05);
    model.q_cp = doc.value("q_cp", 0.0);
    model.n_calibration = doc.value("n_calibration", std::size_t{0});
    if (model.n_calibration < 1)
        throw ValidationError(path.string() + ": n_calibration must be at least 1");
    return model;
}

void save_calibration(const CalibrationModel& model, const std::filesystem::path& path) {
    write_json(json{{"alpha", model.alpha},
                    {"q_alpha", model.q_alpha},
                    {"alpha_cp", model.alpha_cp},
                    {"q_cp", model.q_cp},
                    {"n_calibration", model.n_calibration}},
               path);
}

Transcript load_transcript(const std::filesystem::path& path) {
    const json doc = load_json(path);
    Transcript transcript;
    if (doc.contains("entries"))
        for (const auto& [key, entry] : doc.at("entries").items())
            transcript.insert_raw(key, Transcript::Entry{entry.value("prompt", ""),
                                                         entry.value("response", "")});
    return transcript;
}

void save_transcript(const Transcript& transcript, const std::filesystem::path& path) {
    json entries = json::object();
    for (const auto& [key, entry] : transcript.entries())
        entries[key] = {{"prompt", entry.prompt}, {"response", entry.response}};
    write_json(json{{"entries", entries}}, path);
}

PredictionsFile load_predictions(const std::filesystem::path& path) {
    const json doc = load_json(path);
    PredictionsFile out;
    out.method = doc.value("method", "");
    out.trial = doc.value("trial", std::size_t{0});
    out.n_questions = doc.value("n_questions", std::size_t{0});
    if (doc.contains("predictions"))
        for (const auto& [id, owners] : doc.at("predictions").items()) {
            OwnerSet set;
            for (const auto& owner : owners) set.insert(owner.get<std::string>());
            out.predictions[id] = std::move(set);
        }
    if (doc.contains("needs_revisit"))
        out.needs_revisit = doc.at("needs_revisit").get<std::vector<std::string>>();
    return out;
}

void save_predictions(const PredictionsFile& file, const std::filesystem::path& path) {
    json predictions = json::object();
    for (const auto& [id, owners] : file.predictions) predictions[id] = owners;
    write_json(json{{"method", file.method},
                    {"trial", file.trial},
                    {"n_questions", file.n_questions},
                    {"predictions", predictions},
                    {"needs_revisit", file.needs_revisit}},
               path);
}

namespace {

json question_to_json(const Question& q) {
    return json{{"object_id", q.object_id},
                {"text", q.text},
                {"focus_candidates", q.focus_candidates},
                {"truncated", q.truncated}};
}

Question question_from_json(const json& value) {
    Question q;
    q.object_id = value.value("object_id", "");
    q.text = value.value("text", "");
    if (value.contains("focus_candidates"))
        q.focus_candidates = value.at("focus_candidates").get<std::vector<std::string>>();
    q.truncated = value.value("truncated", false);
    return q;
}

json step_to_json(const TraceStep& step) {
    json out;
    out["pass"] = step.pass;
    json refreshed = json::object();
    for (const auto& [id, scores] : step.refreshed) refreshed[id] = scores;
    out["refreshed"] = std::move(refreshed);
    out["fallbacks"] = step.fallbacks;
    json sets = json::object();
    for (const auto& [id, set] : step.sets)
        sets[id] = {{"members", set.members}, {"cp_score", set.cp_score}};
    out["sets"] = std::move(sets);
    out["stop"] = step.stop;
    out["stop_reason"] = step.stop_reason;
    out["snapshot_before"] = snapshot_to_json(step.snapshot_before);
    if (step.metrics_before) out["metrics_before"] = metrics_to_json(*step.metrics_before);
    if (step.selected) out["selected"] = *step.selected;
    if (step.question) out["question"] = question_to_json(*step.question);
    if (step.answer_text) out["answer_text"] = *step.answer_text;
    if (step.answer) out["answer"] = *step.answer;
    out["answer_fallback"] = step.answer_fallback;
    if (step.snapshot_after) out["snapshot_after"] = snapshot_to_json(*step.snapshot_after);
    if (step.metrics_after) out["metrics_after"] = metrics_to_json(*step.metrics_after);
    return out;
}

TraceStep step_from_json(const json& value) {
    TraceStep step;
    step.pass = value.value("pass", std::size_t{0});
    if (value.contains("refreshed"))
        for (const auto& [id, scores] : value.at("refreshed").items())
            step.refreshed[id] = scores.get<OwnershipScores>();
    if (value.contains("fallbacks"))
        step.fallbacks = value.at("fallbacks").get<std::vector<std::string>>();
    if (value.contains("sets")) {
        for (const auto& [id, set] : value.at("sets").items()) {
            PredictionSet ps;
            ps.members = set.at("members").get<std::vector<std::string>>();
            ps.cp_score = set.value("cp_score", 1.0);
            step.sets[id] = std::move(ps);
        }
    }
    step.stop = value.value("stop", false);
    step.stop_reason = value.value("stop_reason", "");
    if (value.contains("snapshot_before"))
        step.snapshot_before = snapshot_from_json(value.at("snapshot_before"));
    if (value.contains("metrics_before"))
        step.metrics_before = metrics_from_json(value.at("metrics_before"));
    if (value.contains("selected")) step.selected = value.at("selected").get<std::string>();
    if (value.contains("question")) step.question = question_from_json(value.at("question"));
    if (value.contains("answer_text"))
        step.answer_text = value.at("answer_text").get<std::string>();
    if (value.contains("answer")) step.answer = value.at("answer").get<AnswerVector>();
    step.answer_fallback = value.value("answer_fallback", false);
    if (value.contains("snapshot_after"))
        step.snapshot_after = snapshot_from_json(value.at("snapshot_after"));
    if (value.contains("metrics_after"))
        step.metrics_after = metrics_from_json(value.at("metrics_after"));
    return step;
}

}  // namespace

void save_trace(const RunTrace& trace, const std::filesystem::path& path) {
    json steps = json::array();
    for (const auto& step : trace.steps) steps.push_back(step_to_json(step));

    json final_state = json::object();
    for (const auto& id : trace.final_state.object_ids()) {
        const ObjectState& entry = trace.final_state.at(id);
        final_state[id] = {{"scores", entry.scores},
                           {"share", share_to_json(entry.share)},
                           {"asked", entry.asked},
                           {"needs_revisit", entry.needs_revisit},
                           {"answered", entry.answered}};
    }

    write_json(json{{"steps", steps},
                    {"final", {{"objects", final_state},
                               {"object_order", trace.final_state.object_ids()},
                               {"q_cnt", trace.final_state.query_count()},
                               {"q_max", trace.final_state.q_max()}}},
                    {"question_count", trace.question_count},
                    {"needs_revisit", trace.needs_revisit},
                    {"aborted", trace.aborted},
                    {"error", trace.error}},
               path);
}

RunTrace load_trace(const std::filesystem::path& path) {
    const json doc = load_json(path);
    RunTrace trace;
    for (const auto& step : doc.at("steps")) trace.steps.push_back(step_from_json(step));
    trace.question_count = doc.value("question_count", std::size_t{0});
    if (doc.contains("needs_revisit"))
        trace.needs_revisit = doc.at("needs_revisit").get<std::vector<std::string>>();
    trace.aborted = doc.value("aborted", false);
    trace.error = doc.value("error", "");

    const json& final = doc.at("final");
    std::vector<std::string> ids =
        final.at("object_order").get<std::vector<std::string>>();
    std::unordered_map<std::string, ObjectState> states;
    for (const auto& [id, entry] : final.at("objects").items()) {
        ObjectState state;
        state.scores = entry.at("scores").get<OwnershipScores>();
        state.share = share_from_json(entry.at("share"));
        state.asked = entry.value("asked", false);
        state.needs_revisit = entry.value("needs_revisit", false);
        if (entry.contains("answered"))
            state.answered = entry.at("answered").get<std::vector<std::string>>();
        states[id] = std::move(state);
    }
    trace.final_state = AcquisitionState::restore(std::move(ids), std::move(states),
                                                  final.value("q_cnt", std::size_t{0}),
                                                  final.value("q_max", std::size_t{0}));
    return trace;
}

namespace {

struct Aggregate {
    double mean = 0.0;
    double std = 0.0;
};

Aggregate aggregate(const std::vector<double>& values) {
    return Aggregate{mean_of(values), stddev_of(values)};
}

json aggregate_json(const Aggregate& a) {
    return json{{"mean", a.mean}, {"std", a.std}};
}

using MetricGetter = double (*)(const MetricsReport&);

const std::vector<std::pair<std::string, MetricGetter>>& metric_getters() {
    static const std::vector<std::pair<std::string, MetricGetter>> getters = {
        {"subset_accuracy", [](const MetricsReport& r) { return r.subset_accuracy; }},
        {"mean_jaccard", [](const MetricsReport& r) { return r.mean_jaccard; }},
        {"micro_precision", [](const MetricsReport& r) { return r.micro_precision; }},
        {"micro_recall", [](const MetricsReport& r) { return r.micro_recall; }},
        {"micro_f1", [](const MetricsReport& r) { return r.micro_f1; }},
    };
    return getters;
}

}  // namespace

void save_report(const std::vector<MethodReport>& methods,
                 const std::filesystem::path& json_path,
                 const std::filesystem::path& tsv_path) {
    json doc;
    std::ostringstream tsv;
    tsv << "method\tcategory\tmetric\tmean\tstd\tn_trials\n";

    json method_map = json::object();
    for (const auto& method : methods) {
        json entry;
        entry["trials"] = method.trials.size();

        auto emit_block = [&](const std::string& category,
                              auto select) -> json {
            json block = json::object();
            for (const auto& [name, getter] : metric_getters()) {
                std::vector<double> values;
                for (const auto& trial : method.trials) {
                    const MetricsReport* report = select(trial);
                    values.push_back(report ? getter(*report) : 0.0);
                }
                const Aggregate agg = aggregate(values);
                block[name] = aggregate_json(agg);
                tsv << method.method << "\t" << category << "\t" << name << "\t"
                    << agg.mean << "\t" << agg.std << "\t" << method.trials.size()
                    << "\n";
            }
            return block;
        };

        entry["overall"] =
            emit_block("overall", [](const MetricsReport& r) { return &r; });

        std::set<std::string> categories;
        for (const auto& trial : method.trials)
            for (const auto& [name, sub] : trial.per_category) {
                (void)sub;
                categories.insert(name);
            }
        json per_category = json::object();
        for (const auto& category : categories) {
            per_category[category] = emit_block(
                category, [&category](const MetricsReport& r) -> const MetricsReport* {
                    auto it = r.per_category.find(category);
                    return it == r.per_category.end() ? nullptr : &it->second;
                });
        }
        entry["per_category"] = std::move(per_category);

        std::vector<double> questions;
        for (const auto& trial : method.trials)
            questions.push_back(static_cast<double>(trial.n_questions));
        const Aggregate q_agg = aggregate(questions);
        entry["n_questions"] = aggregate_json(q_agg);
        tsv << method.method << "\toverall\tn_questions\t" << q_agg.mean << "\t"
            << q_agg.std << "\t" << method.trials.size() << "\n";

        method_map[method.method] = std::move(entry);
    }
    doc["methods"] = std::move(method_map);

    write_json(doc, json_path);
    write_text(tsv_path, tsv.str());
}

void save_curves(const std::string& method,
                 const std::vector<std::vector<MetricsReport>>& per_trial_curves,
                 const std::filesystem::path& path) {
    std::ostringstream out;
    out << "method\ttrial\tstep\tn_questions\tsubset_accuracy\tmean_jaccard\t"
           "micro_precision\tmicro_recall\tmicro_f1\tn_samples\n";
    for (std::size_t trial = 0; trial < per_trial_curves.size(); ++trial) {
        const auto& curve = per_trial_curves[trial];
        for (std::size_t step = 0; step < curve.size(); ++step) {
            const MetricsReport& r = curve[step];
            out << method << "\t" << trial << "\t" << step << "\t" << r.n_questions
                << "\t" << r.subset_accuracy << "\t" << r.mean_jaccard << "\t"
                << r.micro_precision << "\t" << r.micro_recall << "\t" << r.micro_f1
                << "\t" << r.n_samples << "\n";
        }
    }
    write_text(path, out.str());
}

}  // namespace storage
}  // namespace ownmap

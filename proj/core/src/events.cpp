#include "ownmap/events.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "ownmap/errors.hpp"

namespace ownmap {

const char* to_string(ActionType a) {
    switch (a) {
        case ActionType::use: return "use";
        case ActionType::place: return "place";
        case ActionType::transport: return "transport";
        case ActionType::clean: return "clean";
        case ActionType::search: return "search";
        case ActionType::other: return "other";
    }
    return "other";
}

std::optional<ActionType> action_from_string(const std::string& s) {
    if (s == "use") return ActionType::use;
    if (s == "place") return ActionType::place;
    if (s == "transport") return ActionType::transport;
    if (s == "clean") return ActionType::clean;
    if (s == "search") return ActionType::search;
    if (s == "other") return ActionType::other;
    return std::nullopt;
}

void EventLog::add(Event e) {
    if (frozen_) throw StateError("event log: frozen, no further ingestion");
    events_.push_back(std::move(e));
}

void EventLog::freeze() {
    std::stable_sort(events_.begin(), events_.end(),
                     [](const Event& a, const Event& b) { return a.time < b.time; });
    frozen_ = true;
}

std::vector<std::size_t> EventLog::indices_for_object(const std::string& object_id) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < events_.size(); ++i)
        if (events_[i].object_id == object_id) out.push_back(i);
    return out;
}

std::optional<Timestamp> EventLog::earliest() const {
    if (events_.empty()) return std::nullopt;
    return events_.front().time;
}

std::optional<Timestamp> EventLog::latest() const {
    if (events_.empty()) return std::nullopt;
    return events_.back().time;
}

namespace {

std::vector<std::string> tokenize_lower(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!current.empty()) tokens.push_back(current), current.clear();
        } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'') {
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    if (!current.empty()) tokens.push_back(current);
    return tokens;
}

bool has_token(const std::vector<std::string>& tokens,
               std::initializer_list<const char*> words) {
    for (const auto& t : tokens)
        for (const char* w : words)
            if (t == w) return true;
    return false;
}

ActionType classify_action(const std::string& text) {
    const auto tokens = tokenize_lower(text);
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        if ((tokens[i] == "looks" || tokens[i] == "look" || tokens[i] == "looking") &&
            tokens[i + 1] == "for")
            return ActionType::search;
    }
    if (has_token(tokens, {"searches", "searching"})) return ActionType::search;
    if (has_token(tokens, {"puts", "places", "put", "place"})) return ActionType::place;
    if (has_token(tokens, {"carries", "brings", "carrying", "bringing"}))
        return ActionType::transport;
    if (has_token(tokens, {"cleans", "washes", "cleaning", "washing"}))
        return ActionType::clean;
    if (has_token(tokens, {"takes", "take", "uses", "use", "using", "reads", "read",
                           "reading"}))
        return ActionType::use;
    return ActionType::other;
}

// Object reference: the token following the first "the". Trailing
// punctuation is stripped; identifiers keep their case.
std::string extract_object_id(const std::string& text) {
    std::istringstream in(text);
    std::string word;
    bool after_the = false;
    while (in >> word) {
        if (after_the) {
            while (!word.empty() &&
                   std::ispunct(static_cast<unsigned char>(word.back())))
                word.pop_back();
            return word;
        }
        std::string lowered = word;
        std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (lowered == "the") after_the = true;
    }
    return "";
}

}  // namespace

EventLog parse_events(const std::vector<std::string>& caption_lines,
                      const Roster& roster,
                      ParseReport* report) {
    EventLog log;
    std::size_t line_number = 0;
    for (const auto& line : caption_lines) {
        ++line_number;
        if (line.empty()) continue;

        const auto time = parse_timestamp(line);
        if (!time || line.size() < 17 || line[16] != ' ') {
            if (report)
                report->rejected.push_back({line_number, line, "malformed timestamp"});
            continue;
        }

        const std::string text = line.substr(17);
        if (text.empty()) {
            if (report) report->rejected.push_back({line_number, line, "empty caption"});
            continue;
        }

        Event event;
        event.time = *time;
        event.raw_text = line;

        std::istringstream in(text);
        in >> event.user;
        event.unknown_user = !roster.contains(event.user);
        event.action = classify_action(text);
        event.object_id = extract_object_id(text);
        log.add(std::move(event));
    }
    log.freeze();
    return log;
}

UsageSummary usage_summary(const EventLog& log,
                           const std::string& object_id,
                           double window_days,
                           Timestamp now,
                           const std::string& object_name) {
    if (window_days <= 0.0)
        throw ValidationError("usage summary: window_days must be positive");

    UsageSummary summary;
    summary.object_id = object_id;
    summary.object_name = object_name.empty() ? object_id : object_name;
    summary.window_days = window_days;

    const Timestamp window_start =
        now - static_cast<Timestamp>(window_days * static_cast<double>(kSecondsPerDay));

    struct Accum {
        std::size_t total = 0;
        std::map<std::string, std::size_t> actions;
        Timestamp last = 0;
        std::vector<std::pair<Timestamp, std::string>> captions;
    };
    std::map<std::string, Accum> per_user;

    for (const std::size_t idx : log.indices_for_object(object_id)) {
        const Event& e = log.events()[idx];
        if (e.time < window_start || e.time > now) continue;
        Accum& acc = per_user[e.user];
        acc.total += 1;
        acc.actions[to_string(e.action)] += 1;
        acc.last = std::max(acc.last, e.time);
        acc.captions.emplace_back(e.time, e.raw_text);
    }

    for (auto& [user, acc] : per_user) {
        UserUsage usage;
        usage.user_id = user;
        usage.total_events = acc.total;
        usage.actions = acc.actions;
        usage.last_used_days_ago = days_between(now, acc.last);
        // Two most recent captions, presented in chronological order.
        std::stable_sort(acc.captions.begin(), acc.captions.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        const std::size_t n = acc.captions.size();
        for (std::size_t i = n > 2 ? n - 2 : 0; i < n; ++i)
            usage.example_events.push_back(acc.captions[i].second);
        summary.user_summary.push_back(std::move(usage));
    }

    std::sort(summary.user_summary.begin(), summary.user_summary.end(),
              [](const UserUsage& a, const UserUsage& b) {
                  if (a.total_events != b.total_events)
                      return a.total_events > b.total_events;
                  return a.user_id < b.user_id;
              });
    return summary;
}

std::vector<Session> segment_sessions(const EventLog& log,
                                      const std::string& object_id,
                                      std::int64_t gap_seconds) {
    if (gap_seconds <= 0)
        throw ValidationError("sessions: gap must be positive");

    std::vector<Session> sessions;
    for (const std::size_t idx : log.indices_for_object(object_id)) {
        const Event& e = log.events()[idx];
        const bool start_new = sessions.empty() ||
                               sessions.back().user != e.user ||
                               e.time - sessions.back().end > gap_seconds;
        if (start_new) {
            Session s;
            s.object_id = object_id;
            s.user = e.user;
            s.start = e.time;
            s.end = e.time;
            sessions.push_back(std::move(s));
        }
        sessions.back().end = e.time;
        sessions.back().event_indices.push_back(idx);
    }
    return sessions;
}

}  // namespace ownmap

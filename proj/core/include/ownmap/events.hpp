#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ownmap/roster.hpp"
#include "ownmap/timestamp.hpp"

namespace ownmap {

enum class ActionType { use, place, transport, clean, search, other };

const char* to_string(ActionType a);
std::optional<ActionType> action_from_string(const std::string& s);

/// One time-stamped interaction caption, parsed into structured fields.
/// raw_text keeps the original caption verbatim.
struct Event {
    Timestamp time = 0;
    std::string user;
    ActionType action = ActionType::other;
    std::string object_id;
    std::string raw_text;
    bool unknown_user = false;
};

/// A line parse_events rejected, with its 1-based position and reason.
struct RejectedLine {
    std::size_t line_number = 0;
    std::string line;
    std::string reason;
};

/// Append-only during ingestion, then frozen. Events are kept in
/// chronological order (stable on equal timestamps).
class EventLog {
public:
    void add(Event e);
    void freeze();

    const std::vector<Event>& events() const noexcept { return events_; }
    std::size_t size() const noexcept { return events_.size(); }
    bool empty() const noexcept { return events_.empty(); }

    /// Indices of events touching the given object, in log order.
    std::vector<std::size_t> indices_for_object(const std::string& object_id) const;

    std::optional<Timestamp> earliest() const;
    std::optional<Timestamp> latest() const;

private:
    std::vector<Event> events_;
    bool frozen_ = false;
};

struct ParseReport {
    std::vector<RejectedLine> rejected;
};

/// Parses caption lines of the form "YYYY-MM-DD HH:MM <user> <text>".
/// Action types come from a keyword table; the object id is the token
/// following the first "the". Lines with malformed timestamps are rejected
/// (reported with their position); captions naming users outside the
/// roster are kept and flagged unknown.
EventLog parse_events(const std::vector<std::string>& caption_lines,
                      const Roster& roster,
                      ParseReport* report = nullptr);

/// Per-user aggregation of one object's recent events.
struct UserUsage {
    std::string user_id;
    std::size_t total_events = 0;
    std::map<std::string, std::size_t> actions;  // action name -> count
    double last_used_days_ago = 0.0;
    std::vector<std::string> example_events;  // up to 2 most recent captions
};

struct UsageSummary {
    std::string object_id;
    std::string object_name;
    std::vector<UserUsage> user_summary;  // total_events desc, then name
    double window_days = 0.0;
};

/// Aggregates the object's events inside [now - window_days, now]:
/// per-user action counts, recency in fractional days, and up to two most
/// recent captions as examples. Users with zero in-window events are
/// omitted. object_name defaults to the object id when the caller has no
/// class label at hand.
UsageSummary usage_summary(const EventLog& log,
                           const std::string& object_id,
                           double window_days,
                           Timestamp now,
                           const std::string& object_name = "");

/// Maximal run of same-user events on one object with inter-event gaps
/// at most the threshold.
struct Session {
    std::string object_id;
    std::string user;
    Timestamp start = 0;
    Timestamp end = 0;
    std::vector<std::size_t> event_indices;  // indices into log.events()
};

/// Splits the object's chronological event sequence into sessions. A user
/// change always splits; otherwise events within gap_seconds stay joined.
std::vector<Session> segment_sessions(const EventLog& log,
                                      const std::string& object_id,
                                      std::int64_t gap_seconds);

inline constexpr std::int64_t kDefaultSessionGapSeconds = 30 * kSecondsPerMinute;

}  // namespace ownmap

#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace ownmap {

/// Seconds since the Unix epoch, UTC. Event files carry minute resolution.
using Timestamp = std::int64_t;

inline constexpr std::int64_t kSecondsPerMinute = 60;
inline constexpr std::int64_t kSecondsPerHour = 3600;
inline constexpr std::int64_t kSecondsPerDay = 86400;

/// Parses "YYYY-MM-DD HH:MM". Returns nullopt on malformed input.
std::optional<Timestamp> parse_timestamp(const std::string& text);

/// Formats as "YYYY-MM-DD HH:MM" (UTC).
std::string format_timestamp(Timestamp t);

/// Signed difference (a - b) expressed in fractional days.
inline double days_between(Timestamp a, Timestamp b) {
    return static_cast<double>(a - b) / static_cast<double>(kSecondsPerDay);
}

}  // namespace ownmap

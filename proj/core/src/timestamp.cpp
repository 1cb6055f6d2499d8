#include "ownmap/timestamp.hpp"

#include <cstdio>
#include <ctime>

namespace ownmap {

std::optional<Timestamp> parse_timestamp(const std::string& text) {
    int year = 0, month = 0, day = 0, hour = 0, minute = 0;
    char tail = '\0';
    const int n = std::sscanf(text.c_str(), "%4d-%2d-%2d %2d:%2d%c",
                              &year, &month, &day, &hour, &minute, &tail);
    if (n < 5) return std::nullopt;
    if (text.size() < 16 || text[4] != '-' || text[7] != '-' || text[13] != ':')
        return std::nullopt;
    if (month < 1 || month > 12 || day < 1 || day > 31) return std::nullopt;
    if (hour < 0 || hour > 23 || minute < 0 || minute > 59) return std::nullopt;

    std::tm tm{};
    tm.tm_year = year - 1900;
    tm.tm_mon = month - 1;
    tm.tm_mday = day;
    tm.tm_hour = hour;
    tm.tm_min = minute;
    tm.tm_sec = 0;
    const time_t t = timegm(&tm);
    if (t == static_cast<time_t>(-1)) return std::nullopt;
    return static_cast<Timestamp>(t);
}

std::string format_timestamp(Timestamp t) {
    const time_t tt = static_cast<time_t>(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d %02d:%02d",
                  tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min);
    return buf;
}

}  // namespace ownmap

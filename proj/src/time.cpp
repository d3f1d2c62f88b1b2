#include "mobility/time.hpp"

#include <chrono>
#include <cstdio>

namespace mobility {

namespace {

constexpr std::int64_t kSecondsPerDay = 86'400;

// Floor division so negative instants (pre-1970) stay consistent.
std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if (a % b != 0 && (a < 0) != (b < 0)) --q;
    return q;
}

} // namespace

CivilSeconds to_seconds(const CivilTime& t) {
    using namespace std::chrono;
    const year_month_day ymd{year{t.year}, month{static_cast<unsigned>(t.month)},
                             day{static_cast<unsigned>(t.day)}};
    const sys_days days{ymd};
    return static_cast<CivilSeconds>(days.time_since_epoch().count()) * kSecondsPerDay +
           t.hour * 3'600 + t.minute * 60 + t.second;
}

CivilTime from_seconds(CivilSeconds s) {
    using namespace std::chrono;
    const std::int64_t day_count = floor_div(s, kSecondsPerDay);
    const std::int64_t sod = s - day_count * kSecondsPerDay;
    const year_month_day ymd{sys_days{days{day_count}}};
    CivilTime t;
    t.year = static_cast<int>(ymd.year());
    t.month = static_cast<int>(static_cast<unsigned>(ymd.month()));
    t.day = static_cast<int>(static_cast<unsigned>(ymd.day()));
    t.hour = static_cast<int>(sod / 3'600);
    t.minute = static_cast<int>((sod % 3'600) / 60);
    t.second = static_cast<int>(sod % 60);
    return t;
}

int weekday(CivilSeconds s) {
    // 1970-01-01 was a Thursday; +3 shifts to Monday = 0.
    const std::int64_t day_count = floor_div(s, kSecondsPerDay);
    return static_cast<int>(((day_count + 3) % 7 + 7) % 7);
}

bool is_weekend(CivilSeconds s) { return weekday(s) >= 5; }

int hour_of_day(CivilSeconds s) { return second_of_day(s) / 3'600; }
int minute_of_day(CivilSeconds s) { return second_of_day(s) / 60; }

int second_of_day(CivilSeconds s) {
    const std::int64_t day_count = floor_div(s, kSecondsPerDay);
    return static_cast<int>(s - day_count * kSecondsPerDay);
}

std::optional<CivilSeconds> parse_timestamp(std::string_view text) {
    CivilTime t;
    char sep = 0;
    int n = 0;
    const int got = std::sscanf(std::string(text).c_str(), "%d-%d-%d%c%d:%d:%d%n", &t.year,
                                &t.month, &t.day, &sep, &t.hour, &t.minute, &t.second, &n);
    if (got < 6) return std::nullopt;
    if (sep != ' ' && sep != 'T') return std::nullopt;
    if (got == 6) t.second = 0;
    // Reject trailing garbage beyond what sscanf consumed.
    std::size_t consumed = (got == 7) ? static_cast<std::size_t>(n) : text.size();
    if (got == 6) {
        // Re-scan to find the end of the minutes field.
        int y, mo, d, h, mi, end = 0;
        std::sscanf(std::string(text).c_str(), "%d-%d-%d%*c%d:%d%n", &y, &mo, &d, &h, &mi, &end);
        consumed = static_cast<std::size_t>(end);
    }
    if (consumed != text.size()) return std::nullopt;

    using namespace std::chrono;
    const year_month_day ymd{year{t.year}, month{static_cast<unsigned>(t.month)},
                             day{static_cast<unsigned>(t.day)}};
    if (!ymd.ok()) return std::nullopt;
    if (t.hour < 0 || t.hour > 23 || t.minute < 0 || t.minute > 59 || t.second < 0 ||
        t.second > 59) {
        return std::nullopt;
    }
    return to_seconds(t);
}

std::string format_timestamp(CivilSeconds s) {
    const CivilTime t = from_seconds(s);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d %02d:%02d:%02d", t.year, t.month, t.day,
                  t.hour, t.minute, t.second);
    return buf;
}

} // namespace mobility

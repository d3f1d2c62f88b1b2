#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mobility {

/// Seconds since 1970-01-01 00:00:00 on the local civil clock.
/// Timestamps are treated as plain wall-clock readings: no time zone and no
/// DST adjustment is ever applied.
using CivilSeconds = std::int64_t;

struct CivilTime {
    int year = 1970;
    int month = 1; // 1..12
    int day = 1;   // 1..31
    int hour = 0;
    int minute = 0;
    int second = 0;
};

CivilSeconds to_seconds(const CivilTime& t);
CivilTime from_seconds(CivilSeconds s);

/// Day of week, 0 = Monday .. 6 = Sunday.
int weekday(CivilSeconds s);
bool is_weekend(CivilSeconds s);

int hour_of_day(CivilSeconds s);
int minute_of_day(CivilSeconds s);
int second_of_day(CivilSeconds s);

/// Accepts "YYYY-MM-DD HH:MM:SS", "YYYY-MM-DDTHH:MM:SS" and the same without
/// the seconds field. Returns nullopt for anything else (including invalid
/// calendar dates).
std::optional<CivilSeconds> parse_timestamp(std::string_view text);
std::string format_timestamp(CivilSeconds s);

} // namespace mobility

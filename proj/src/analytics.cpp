#include "mobility/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mobility/error.hpp"

namespace mobility {

double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw DataError("percentile of empty set");
    std::sort(values.begin(), values.end());
    const double h = static_cast<double>(values.size() - 1) * q;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

std::vector<std::pair<std::string, std::array<double, 7>>>
day_of_week_distribution(std::span<const CohortTrips> cohorts) {
    std::vector<std::pair<std::string, std::array<double, 7>>> result;
    for (const CohortTrips& cohort : cohorts) {
        if (cohort.trips.empty()) {
            throw DataError("day_of_week_distribution: empty cohort " + cohort.name);
        }
        std::array<std::size_t, 7> counts{};
        for (const CleanTrip& t : cohort.trips) ++counts[weekday(t.start_instant)];
        std::array<double, 7> shares{};
        for (int d = 0; d < 7; ++d) {
            shares[d] = static_cast<double>(counts[d]) / static_cast<double>(cohort.trips.size());
        }
        result.emplace_back(cohort.name, shares);
    }
    return result;
}

HourlyDistribution hourly_distribution(std::span<const CleanTrip> trips) {
    if (trips.empty()) throw DataError("hourly_distribution: no trips");
    std::array<std::size_t, 24> weekday_counts{}, weekend_counts{};
    std::size_t weekday_total = 0, weekend_total = 0;
    for (const CleanTrip& t : trips) {
        const int h = hour_of_day(t.start_instant);
        if (is_weekend(t.start_instant)) {
            ++weekend_counts[h];
            ++weekend_total;
        } else {
            ++weekday_counts[h];
            ++weekday_total;
        }
    }
    HourlyDistribution dist;
    dist.weekday_empty = weekday_total == 0;
    dist.weekend_empty = weekend_total == 0;
    for (int h = 0; h < 24; ++h) {
        if (weekday_total > 0) {
            dist.weekday[h] =
                static_cast<double>(weekday_counts[h]) / static_cast<double>(weekday_total);
        }
        if (weekend_total > 0) {
            dist.weekend[h] =
                static_cast<double>(weekend_counts[h]) / static_cast<double>(weekend_total);
        }
    }
    return dist;
}

std::vector<DurationBand> duration_percentile_bands(std::span<const CleanTrip> trips) {
    std::map<int, std::vector<double>> by_hour;
    for (const CleanTrip& t : trips) {
        by_hour[hour_of_day(t.start_instant)].push_back(t.duration_s);
    }
    std::vector<DurationBand> bands;
    bands.reserve(by_hour.size());
    for (auto& [hour, durations] : by_hour) {
        DurationBand band;
        band.hour = hour;
        band.p25 = percentile(durations, 0.25);
        band.p50 = percentile(durations, 0.50);
        band.p75 = percentile(durations, 0.75);
        bands.push_back(band);
    }
    return bands;
}

double ZoneShares::total_percent() const {
    double total = unassigned_percent;
    for (const auto& [id, pct] : percent_by_zone) total += pct;
    return total;
}

ZoneShares zone_start_shares(std::span<const CleanTrip> trips, const ZoneSet& zones,
                             MinuteWindow window) {
    ZoneShares result;
    std::map<std::string, std::size_t> counts;
    for (const Zone& z : zones.zones()) counts[z.id] = 0;
    std::size_t unassigned = 0;
    for (const CleanTrip& t : trips) {
        const int minute = minute_of_day(t.start_instant);
        if (minute < window.begin_minute || minute >= window.end_minute) continue;
        ++result.window_trip_count;
        if (const auto id = zones.assign(t.start_loc.point)) {
            ++counts[*id];
        } else {
            ++unassigned;
        }
    }
    if (result.window_trip_count == 0) {
        result.empty_window = true;
        for (const Zone& z : zones.zones()) result.percent_by_zone.emplace_back(z.id, 0.0);
        return result;
    }
    const double denom = static_cast<double>(result.window_trip_count);
    for (const Zone& z : zones.zones()) {
        result.percent_by_zone.emplace_back(z.id,
                                            100.0 * static_cast<double>(counts[z.id]) / denom);
    }
    result.unassigned_percent = 100.0 * static_cast<double>(unassigned) / denom;
    return result;
}

} // namespace mobility

#pragma once

#include <array>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mobility/geo.hpp"
#include "mobility/ingest.hpp"

namespace mobility {

/// Linear interpolation between closest ranks, h = (n-1)*q. Input need not be
/// sorted; q in [0, 1].
double percentile(std::vector<double> values, double q);

struct CohortTrips {
    std::string name;
    std::span<const CleanTrip> trips;
};

/// Fraction of each cohort's trips per day, Monday..Sunday.
std::vector<std::pair<std::string, std::array<double, 7>>>
day_of_week_distribution(std::span<const CohortTrips> cohorts);

struct HourlyDistribution {
    std::array<double, 24> weekday{};
    std::array<double, 24> weekend{};
    bool weekday_empty = true; // no trips fell on that series
    bool weekend_empty = true;
};

/// Share of trips per start hour, split into weekday and weekend series
/// (weekend = Saturday or Sunday). Each non-empty series sums to 1.
HourlyDistribution hourly_distribution(std::span<const CleanTrip> trips);

struct DurationBand {
    int hour = 0;
    double p25 = 0, p50 = 0, p75 = 0; // seconds
};

/// 25/50/75th duration percentiles per start hour; hours with no trips are
/// omitted.
std::vector<DurationBand> duration_percentile_bands(std::span<const CleanTrip> trips);

/// Half-open window [begin_minute, end_minute) over minute-of-day.
struct MinuteWindow {
    int begin_minute = 0;
    int end_minute = 24 * 60;
};

struct ZoneShares {
    std::vector<std::pair<std::string, double>> percent_by_zone; // zones in file order
    double unassigned_percent = 0;
    std::size_t window_trip_count = 0;
    bool empty_window = false;

    /// Including the unassigned bucket; 100 when the window is non-empty.
    double total_percent() const;
};

/// Percent of window trips starting in each zone (zones with zero trips
/// included), plus an unassigned bucket. Docked trips use their station
/// coordinates as start points.
ZoneShares zone_start_shares(std::span<const CleanTrip> trips, const ZoneSet& zones,
                             MinuteWindow window);

} // namespace mobility

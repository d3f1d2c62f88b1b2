#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "mobility/analytics.hpp"
#include "mobility/error.hpp"
#include "mobility/ingest.hpp"
#include "mobility/synth.hpp"

using namespace mobility;

namespace {

const VoronoiPartition& test_partition() {
    static const VoronoiPartition partition = VoronoiPartition::build(fixture_stations(49, 77));
    return partition;
}

void check_normalised(const auto& weights) {
    double total = 0;
    for (double w : weights) {
        CHECK(w >= 0.0);
        total += w;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

} // namespace

TEST_CASE("default_profiles: weights normalised, shapes as documented") {
    const DefaultProfiles profiles = default_profiles(test_partition());
    for (const CohortProfile* p :
         {&profiles.commuter, &profiles.recreational, &profiles.dockless_bike, &profiles.scooter}) {
        check_normalised(p->day_weights);
        check_normalised(p->weekday_hour_weights);
        check_normalised(p->weekend_hour_weights);
        check_normalised(p->start_cells.am);
        check_normalised(p->start_cells.pm);
        check_normalised(p->end_cells.am);
        check_normalised(p->end_cells.pm);
    }
    CHECK(profiles.commuter.day_weights[5] + profiles.commuter.day_weights[6] < 2.0 / 7.0);
    CHECK(profiles.recreational.duration_median_min >= 20.0);
    CHECK(profiles.recreational.duration_median_min <= 27.0);
    CHECK(profiles.commuter.label == UserType::Member);
    CHECK(profiles.recreational.label == UserType::Casual);
    CHECK_FALSE(profiles.scooter.label.has_value());
}

TEST_CASE("generate: empty, deterministic, seed-sensitive") {
    const DefaultProfiles profiles = default_profiles(test_partition());
    CHECK(generate(profiles.commuter, 0, 1, test_partition()).empty());

    const auto a = generate(profiles.scooter, 200, 42, test_partition());
    const auto b = generate(profiles.scooter, 200, 42, test_partition());
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].start_instant == b[i].start_instant);
        CHECK(a[i].duration_s == b[i].duration_s);
        CHECK(a[i].start_loc.point == b[i].start_loc.point);
        CHECK(a[i].end_loc.point == b[i].end_loc.point);
    }
    const auto c = generate(profiles.scooter, 200, 43, test_partition());
    bool any_different = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        any_different = any_different || !(a[i].start_loc.point == c[i].start_loc.point);
    }
    CHECK(any_different);
}

TEST_CASE("generate: commuter durations hit the target median and survive cleaning") {
    const DefaultProfiles profiles = default_profiles(test_partition());
    const auto trips = generate(profiles.commuter, 10'000, 7, test_partition());
    REQUIRE(trips.size() == 10'000);

    std::vector<double> durations;
    durations.reserve(trips.size());
    for (const CleanTrip& t : trips) durations.push_back(t.duration_s);
    const double median = percentile(durations, 0.5);
    CHECK(median >= 0.9 * 600.0);
    CHECK(median <= 1.1 * 600.0);

    const auto cleaned = clean(trips, fixture_boundary());
    CHECK(cleaned.report.kept_count == trips.size());
    for (std::size_t c : cleaned.report.removed_by_rule) CHECK(c == 0);
}

TEST_CASE("generate: labels and vehicle classes follow the profile") {
    const DefaultProfiles profiles = default_profiles(test_partition());
    for (const CleanTrip& t : generate(profiles.recreational, 50, 3, test_partition())) {
        CHECK(t.label == UserType::Casual);
        CHECK(t.vehicle_class == VehicleClass::DockedBike);
    }
    for (const CleanTrip& t : generate(profiles.dockless_bike, 50, 3, test_partition())) {
        CHECK_FALSE(t.label.has_value());
        CHECK(t.vehicle_class == VehicleClass::DocklessBike);
    }
}

TEST_CASE("generate: empirical day and hour frequencies converge to the profile") {
    const DefaultProfiles profiles = default_profiles(test_partition());
    const auto trips = generate(profiles.recreational, 100'000, 11, test_partition());

    std::array<double, 7> day_freq{};
    std::array<double, 24> weekday_hour_freq{};
    std::size_t weekday_n = 0;
    for (const CleanTrip& t : trips) {
        day_freq[weekday(t.start_instant)] += 1.0;
        if (!is_weekend(t.start_instant)) {
            weekday_hour_freq[hour_of_day(t.start_instant)] += 1.0;
            ++weekday_n;
        }
    }
    double day_tv = 0;
    for (int d = 0; d < 7; ++d) {
        day_tv += std::abs(day_freq[d] / 100'000.0 - profiles.recreational.day_weights[d]);
    }
    CHECK(day_tv / 2.0 < 0.02);

    double hour_tv = 0;
    for (int h = 0; h < 24; ++h) {
        hour_tv += std::abs(weekday_hour_freq[h] / static_cast<double>(weekday_n) -
                            profiles.recreational.weekday_hour_weights[h]);
    }
    CHECK(hour_tv / 2.0 < 0.02);
}

TEST_CASE("fixture geometry: stations distinct and inside the boundary, zones tile") {
    const auto stations = fixture_stations(269, 1);
    REQUIRE(stations.size() == 269);
    const auto partition = VoronoiPartition::build(stations); // throws on duplicates
    CHECK(partition.size() == 269);
    const Polygon boundary = fixture_boundary();
    for (const Station& s : stations) CHECK(boundary.contains(s.location));

    const ZoneSet zones = fixture_zones(8, 8);
    CHECK(zones.zones().size() == 64);
    const Bbox box = fixture_bbox();
    CHECK(zones.assign({(box.min_lat + box.max_lat) / 2, (box.min_lon + box.max_lon) / 2})
              .has_value());
}

TEST_CASE("synthetic files round-trip through the parsers and cleaner") {
    const auto& partition = test_partition();
    const DefaultProfiles profiles = default_profiles(partition);
    const StationIndex index = make_station_index(partition.stations());
    const Polygon boundary = fixture_boundary();

    // Labelled trips through the docked schema.
    const auto commuters = generate(profiles.commuter, 500, 21, partition);
    std::stringstream docked;
    write_docked_csv(docked, commuters, partition, "seed=21");
    const auto docked_parsed = parse_docked(docked);
    CHECK(docked_parsed.errors.empty());
    REQUIRE(docked_parsed.records.size() == 500);
    CHECK(docked_parsed.records[0].user_type == UserType::Member);
    const auto docked_clean = clean(docked_parsed.records, index, boundary);
    CHECK(docked_clean.report.kept_count == 500);

    // Unlabelled trips through the dockless schema.
    const auto scooters = generate(profiles.scooter, 500, 22, partition);
    std::stringstream dockless;
    write_dockless_csv(dockless, scooters, "seed=22");
    const auto dockless_parsed = parse_dockless(dockless);
    CHECK(dockless_parsed.errors.empty());
    REQUIRE(dockless_parsed.records.size() == 500);
    CHECK(dockless_parsed.records[0].vehicle_class == RawVehicleClass::Scooter);
    const auto dockless_clean = clean(dockless_parsed.records, boundary);
    CHECK(dockless_clean.report.kept_count == 500);
    CHECK(dockless_clean.trips[0].vehicle_class == VehicleClass::Scooter);
}

TEST_CASE("profile JSON round trip") {
    const DefaultProfiles profiles = default_profiles(test_partition());
    const std::string json = profiles.scooter.to_json();
    const CohortProfile loaded = CohortProfile::from_json(json);
    CHECK(loaded.name == "scooter");
    CHECK_FALSE(loaded.label.has_value());
    CHECK(loaded.vehicle_class == VehicleClass::Scooter);
    CHECK(loaded.day_weights == profiles.scooter.day_weights);
    CHECK(loaded.start_cells.am == profiles.scooter.start_cells.am);
    CHECK(loaded.duration_median_min == profiles.scooter.duration_median_min);

    CHECK_THROWS_AS(CohortProfile::from_json("{"), ConfigError);
    CohortProfile bad = profiles.commuter;
    bad.day_weights[0] = -1;
    CHECK_THROWS_AS(CohortProfile::from_json(bad.to_json()), ConfigError);
}

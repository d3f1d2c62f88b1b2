#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mobility/geo.hpp"
#include "mobility/ingest.hpp"

namespace mobility {

/// Parametric trip-generating behaviour. Weight vectors are normalised on
/// construction/load; cell weight vectors are indexed by partition cell and
/// conditioned on morning (before noon) vs afternoon.
struct CellWeights {
    std::vector<double> am;
    std::vector<double> pm;
};

struct CohortProfile {
    std::string name;
    std::optional<UserType> label;
    VehicleClass vehicle_class = VehicleClass::DockedBike;
    std::array<double, 7> day_weights{};
    std::array<double, 24> weekday_hour_weights{};
    std::array<double, 24> weekend_hour_weights{};
    double duration_median_min = 10.0;
    double duration_sigma = 0.6;
    CellWeights start_cells;
    CellWeights end_cells;

    std::string to_json() const;
    static CohortProfile from_json(const std::string& text);
};

struct DefaultProfiles {
    CohortProfile commuter;      // labelled Member
    CohortProfile recreational;  // labelled Casual
    CohortProfile dockless_bike; // unlabelled
    CohortProfile scooter;       // unlabelled
};

/// Built-in profiles over the given partition's cells; the calibration
/// numbers live in src/profile_constants.hpp.
DefaultProfiles default_profiles(const VoronoiPartition& partition);

/// n independent trips: day, then hour conditioned on weekday/weekend, then
/// uniform minute; log-normal duration truncated to [60 s, 24 h]; start/end
/// cells sampled then jittered uniformly within 200 m of the cell's station.
/// Per-trip sub-seeds make the output independent of evaluation order.
/// Trips always satisfy the cleaning predicates over the matching fixture
/// boundary.
std::vector<CleanTrip> generate(const CohortProfile& profile, std::size_t n, std::uint64_t seed,
                                const VoronoiPartition& partition);

// --- desk-scale fixture geometry ---

/// Deterministic jittered grid of `count` pseudo-stations across the fixture
/// bbox (pairwise-distinct coordinates).
std::vector<Station> fixture_stations(std::size_t count, std::uint64_t seed);

/// Rectangle slightly padded beyond the fixture bbox; contains every
/// generated endpoint.
Polygon fixture_boundary();

/// rows x cols grid of rectangular zones tiling the fixture bbox, ids Z01...
ZoneSet fixture_zones(int rows, int cols);

Bbox fixture_bbox();

// --- raw-file round trip ---

/// Writes labelled trips in the docked schema (endpoints snapped to their
/// nearest station) and unlabelled trips in the dockless schema, so the
/// generator's output feeds straight back into the parsers.
void write_docked_csv(std::ostream& out, const std::vector<CleanTrip>& trips,
                      const VoronoiPartition& partition, const std::string& comment = "");
void write_dockless_csv(std::ostream& out, const std::vector<CleanTrip>& trips,
                        const std::string& comment = "");

} // namespace mobility

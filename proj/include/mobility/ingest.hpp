#pragma once

#include <array>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mobility/geo.hpp"
#include "mobility/time.hpp"

namespace mobility {

enum class UserType { Casual = 0, Member = 1 };

/// Vehicle kind as it appears in a raw dockless feed.
enum class RawVehicleClass { Bike, Scooter };

/// Vehicle kind after cleaning, with the docked/dockless distinction kept.
enum class VehicleClass { DockedBike, DocklessBike, Scooter };

std::string to_string(UserType t);
std::string to_string(VehicleClass c);

struct RawDockedTrip {
    CivilSeconds start_time = 0;
    CivilSeconds end_time = 0;
    std::string start_station_id;
    std::string end_station_id;
    UserType user_type = UserType::Casual;
    std::string vehicle_id;
};

struct RawDocklessTrip {
    CivilSeconds start_time = 0;
    CivilSeconds end_time = 0;
    LatLon start_point;
    LatLon end_point;
    std::string operator_name;
    RawVehicleClass vehicle_class = RawVehicleClass::Bike;
    bool cancelled = false;
};

/// Trip endpoint: a station (with its resolved coordinates) or a bare GPS
/// point for dockless trips.
struct TripLocation {
    std::optional<std::string> station_id;
    LatLon point;
};

struct CleanTrip {
    CivilSeconds start_instant = 0;
    double duration_s = 0;
    TripLocation start_loc;
    TripLocation end_loc;
    std::optional<UserType> label;
    VehicleClass vehicle_class = VehicleClass::DockedBike;
};

struct RowError {
    std::size_t line = 0;
    std::string message;
};

template <typename T>
struct ParseResult {
    std::vector<T> records;
    std::vector<RowError> errors;
};

/// Column-name mapping for docked trip files. The five core columns are
/// required; a missing required column raises ConfigError naming it.
/// vehicle_id is optional and defaults to empty when absent.
struct DockedColumns {
    std::string start_time = "start_time";
    std::string end_time = "end_time";
    std::string start_station_id = "start_station_id";
    std::string end_station_id = "end_station_id";
    std::string user_type = "user_type";
    std::string vehicle_id = "vehicle_id";
    std::vector<std::string> member_values = {"member", "registered"};
    std::vector<std::string> casual_values = {"casual"};
};

/// Column-name mapping for dockless trip files. Timestamps and coordinates
/// are required. operator/vehicle_class/cancelled are optional: when the
/// named column is absent every record gets the default (operator "",
/// default_class, cancelled=false).
struct DocklessColumns {
    std::string start_time = "start_time";
    std::string end_time = "end_time";
    std::string start_lat = "start_lat";
    std::string start_lon = "start_lon";
    std::string end_lat = "end_lat";
    std::string end_lon = "end_lon";
    std::string operator_name = "operator";
    std::string vehicle_class = "vehicle_class";
    std::string cancelled = "cancelled";
    RawVehicleClass default_class = RawVehicleClass::Bike;
    std::vector<std::string> bike_values = {"bike", "bicycle"};
    std::vector<std::string> scooter_values = {"scooter"};
    std::vector<std::string> cancelled_true_values = {"1", "true", "yes", "y"};
};

/// Rows that fail to parse or violate a field invariant (bad timestamp,
/// latitude out of range, end before start, unknown enum value) are skipped
/// and reported; everything else is returned in file order.
ParseResult<RawDockedTrip> parse_docked(std::istream& in, const DockedColumns& columns = {});
ParseResult<RawDocklessTrip> parse_dockless(std::istream& in, const DocklessColumns& columns = {});

/// Exclusion rules, applied in order; each removed trip is counted under the
/// first rule it violates.
enum class CleaningRule : std::size_t {
    Cancelled = 0,
    Under60s = 1,
    Under120sSameLoc = 2,
    Over24h = 3,
    OutsideBoundary = 4,
};
inline constexpr std::size_t kCleaningRuleCount = 5;
extern const std::array<const char*, kCleaningRuleCount> kCleaningRuleNames;

struct CleaningReport {
    std::size_t input_count = 0;
    std::size_t kept_count = 0;
    std::array<std::size_t, kCleaningRuleCount> removed_by_rule{};

    std::size_t removed(CleaningRule r) const {
        return removed_by_rule[static_cast<std::size_t>(r)];
    }
    std::string to_json() const;
};

struct CleanConfig {
    /// Two dockless endpoints closer than this count as "the same location".
    double loc_equality_radius_m = 10.0;
};

struct CleanResult {
    std::vector<CleanTrip> trips;
    CleaningReport report;
};

/// Docked trips: same-location means equal station ids; endpoints resolve to
/// station coordinates through `stations`. A trip referencing a station id
/// missing from the index cannot be located and falls under outside_boundary.
CleanResult clean(const std::vector<RawDockedTrip>& trips, const StationIndex& stations,
                  const Polygon& boundary, const CleanConfig& config = {});

/// Dockless trips: same-location means haversine distance below the
/// configured radius.
CleanResult clean(const std::vector<RawDocklessTrip>& trips, const Polygon& boundary,
                  const CleanConfig& config = {});

/// Re-cleaning already-clean trips; cleaning is idempotent through this
/// overload.
CleanResult clean(const std::vector<CleanTrip>& trips, const Polygon& boundary,
                  const CleanConfig& config = {});

// --- canonical cleaned-trip file (written by `clean`, read by later stages) ---

void write_clean_trips_csv(std::ostream& out, const std::vector<CleanTrip>& trips,
                           const std::string& comment = "");
std::vector<CleanTrip> read_clean_trips_csv(std::istream& in);

} // namespace mobility

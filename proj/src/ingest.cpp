#include "mobility/ingest.hpp"

#include <algorithm>
#include <cctype>

#include "json.hpp"

#include "mobility/csv.hpp"
#include "mobility/error.hpp"

namespace mobility {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool matches_any(const std::string& value, const std::vector<std::string>& candidates) {
    const std::string v = lower(value);
    return std::any_of(candidates.begin(), candidates.end(),
                       [&](const std::string& c) { return lower(c) == v; });
}

std::size_t require_column(const CsvReader& reader, const std::string& name,
                           const char* logical_name) {
    if (auto col = reader.column(name)) return *col;
    throw ConfigError(std::string("missing required column: ") + logical_name + " (mapped to '" +
                      name + "')");
}

std::optional<double> parse_number(const std::string& text) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) return std::nullopt;
        return v;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

} // namespace

std::string to_string(UserType t) { return t == UserType::Member ? "member" : "casual"; }

std::string to_string(VehicleClass c) {
    switch (c) {
        case VehicleClass::DockedBike: return "docked_bike";
        case VehicleClass::DocklessBike: return "dockless_bike";
        case VehicleClass::Scooter: return "scooter";
    }
    return "docked_bike";
}

ParseResult<RawDockedTrip> parse_docked(std::istream& in, const DockedColumns& columns) {
    CsvReader reader(in);
    if (reader.header().empty()) throw ConfigError("docked file: empty input, no header row");
    const std::size_t c_start = require_column(reader, columns.start_time, "start_time");
    const std::size_t c_end = require_column(reader, columns.end_time, "end_time");
    const std::size_t c_ssid = require_column(reader, columns.start_station_id, "start_station_id");
    const std::size_t c_esid = require_column(reader, columns.end_station_id, "end_station_id");
    const std::size_t c_user = require_column(reader, columns.user_type, "user_type");
    const auto c_vehicle = reader.column(columns.vehicle_id);

    ParseResult<RawDockedTrip> result;
    std::vector<std::string> fields;
    std::size_t line_no = 0;
    while (reader.next(fields, line_no)) {
        if (fields.size() < reader.header().size()) {
            result.errors.push_back({line_no, "wrong field count"});
            continue;
        }
        RawDockedTrip trip;
        const auto start = parse_timestamp(fields[c_start]);
        const auto end = parse_timestamp(fields[c_end]);
        if (!start || !end) {
            result.errors.push_back({line_no, "unparseable timestamp"});
            continue;
        }
        if (*end < *start) {
            result.errors.push_back({line_no, "negative duration (end before start)"});
            continue;
        }
        trip.start_time = *start;
        trip.end_time = *end;
        trip.start_station_id = fields[c_ssid];
        trip.end_station_id = fields[c_esid];
        if (trip.start_station_id.empty() || trip.end_station_id.empty()) {
            result.errors.push_back({line_no, "empty station id"});
            continue;
        }
        const std::string& user = fields[c_user];
        if (matches_any(user, columns.member_values)) {
            trip.user_type = UserType::Member;
        } else if (matches_any(user, columns.casual_values)) {
            trip.user_type = UserType::Casual;
        } else {
            result.errors.push_back({line_no, "unknown user_type value: " + user});
            continue;
        }
        if (c_vehicle) trip.vehicle_id = fields[*c_vehicle];
        result.records.push_back(std::move(trip));
    }
    return result;
}

ParseResult<RawDocklessTrip> parse_dockless(std::istream& in, const DocklessColumns& columns) {
    CsvReader reader(in);
    if (reader.header().empty()) throw ConfigError("dockless file: empty input, no header row");
    const std::size_t c_start = require_column(reader, columns.start_time, "start_time");
    const std::size_t c_end = require_column(reader, columns.end_time, "end_time");
    const std::size_t c_slat = require_column(reader, columns.start_lat, "start_lat");
    const std::size_t c_slon = require_column(reader, columns.start_lon, "start_lon");
    const std::size_t c_elat = require_column(reader, columns.end_lat, "end_lat");
    const std::size_t c_elon = require_column(reader, columns.end_lon, "end_lon");
    const auto c_operator = reader.column(columns.operator_name);
    const auto c_class = reader.column(columns.vehicle_class);
    const auto c_cancelled = reader.column(columns.cancelled);

    ParseResult<RawDocklessTrip> result;
    std::vector<std::string> fields;
    std::size_t line_no = 0;
    while (reader.next(fields, line_no)) {
        if (fields.size() < reader.header().size()) {
            result.errors.push_back({line_no, "wrong field count"});
            continue;
        }
        RawDocklessTrip trip;
        const auto start = parse_timestamp(fields[c_start]);
        const auto end = parse_timestamp(fields[c_end]);
        if (!start || !end) {
            result.errors.push_back({line_no, "unparseable timestamp"});
            continue;
        }
        if (*end < *start) {
            result.errors.push_back({line_no, "negative duration (end before start)"});
            continue;
        }
        trip.start_time = *start;
        trip.end_time = *end;
        const auto slat = parse_number(fields[c_slat]);
        const auto slon = parse_number(fields[c_slon]);
        const auto elat = parse_number(fields[c_elat]);
        const auto elon = parse_number(fields[c_elon]);
        if (!slat || !slon || !elat || !elon) {
            result.errors.push_back({line_no, "unparseable coordinate"});
            continue;
        }
        trip.start_point = {*slat, *slon};
        trip.end_point = {*elat, *elon};
        if (!valid_coordinates(trip.start_point) || !valid_coordinates(trip.end_point)) {
            result.errors.push_back({line_no, "coordinate out of range"});
            continue;
        }
        if (c_operator) trip.operator_name = fields[*c_operator];
        if (c_class) {
            const std::string& cls = fields[*c_class];
            if (matches_any(cls, columns.bike_values)) {
                trip.vehicle_class = RawVehicleClass::Bike;
            } else if (matches_any(cls, columns.scooter_values)) {
                trip.vehicle_class = RawVehicleClass::Scooter;
            } else {
                result.errors.push_back({line_no, "unknown vehicle_class value: " + cls});
                continue;
            }
        } else {
            trip.vehicle_class = columns.default_class;
        }
        trip.cancelled = c_cancelled &&
                         matches_any(fields[*c_cancelled], columns.cancelled_true_values);
        result.records.push_back(std::move(trip));
    }
    return result;
}

const std::array<const char*, kCleaningRuleCount> kCleaningRuleNames = {
    "cancelled", "under_60s", "under_120s_same_loc", "over_24h", "outside_boundary"};

std::string CleaningReport::to_json() const {
    nlohmann::json removed;
    for (std::size_t i = 0; i < kCleaningRuleCount; ++i) {
        removed[kCleaningRuleNames[i]] = removed_by_rule[i];
    }
    return nlohmann::json{{"input_count", input_count},
                          {"kept_count", kept_count},
                          {"removed_by_rule", removed}}
        .dump(2);
}

namespace {

// One normalized view of a trip so all three clean() overloads share the
// exact same rule sequence.
struct TripView {
    double duration_s = 0;
    bool cancelled = false;
    bool same_location = false;
    bool located = true; // false when a station id cannot be resolved
    LatLon start_point;
    LatLon end_point;
    CleanTrip cleaned; // fully built candidate output
};

CleanResult apply_rules(std::vector<TripView>&& views, const Polygon& boundary) {
    CleanResult result;
    result.report.input_count = views.size();
    for (TripView& v : views) {
        std::optional<CleaningRule> removed;
        if (v.cancelled) {
            removed = CleaningRule::Cancelled;
        } else if (v.duration_s < 60.0) {
            removed = CleaningRule::Under60s;
        } else if (v.duration_s < 120.0 && v.same_location) {
            removed = CleaningRule::Under120sSameLoc;
        } else if (v.duration_s > 86'400.0) {
            removed = CleaningRule::Over24h;
        } else if (!v.located || !boundary.contains(v.start_point) ||
                   !boundary.contains(v.end_point)) {
            removed = CleaningRule::OutsideBoundary;
        }
        if (removed) {
            ++result.report.removed_by_rule[static_cast<std::size_t>(*removed)];
        } else {
            result.trips.push_back(std::move(v.cleaned));
        }
    }
    result.report.kept_count = result.trips.size();
    return result;
}

} // namespace

CleanResult clean(const std::vector<RawDockedTrip>& trips, const StationIndex& stations,
                  const Polygon& boundary, const CleanConfig& config) {
    if (config.loc_equality_radius_m < 0) {
        throw ConfigError("loc_equality_radius_m must be non-negative");
    }
    std::vector<TripView> views;
    views.reserve(trips.size());
    for (const RawDockedTrip& t : trips) {
        TripView v;
        v.duration_s = static_cast<double>(t.end_time - t.start_time);
        v.same_location = t.start_station_id == t.end_station_id;
        const auto start_it = stations.find(t.start_station_id);
        const auto end_it = stations.find(t.end_station_id);
        v.located = start_it != stations.end() && end_it != stations.end();
        if (v.located) {
            v.start_point = start_it->second.location;
            v.end_point = end_it->second.location;
        }
        v.cleaned.start_instant = t.start_time;
        v.cleaned.duration_s = v.duration_s;
        v.cleaned.start_loc = {t.start_station_id, v.start_point};
        v.cleaned.end_loc = {t.end_station_id, v.end_point};
        v.cleaned.label = t.user_type;
        v.cleaned.vehicle_class = VehicleClass::DockedBike;
        views.push_back(std::move(v));
    }
    return apply_rules(std::move(views), boundary);
}

CleanResult clean(const std::vector<RawDocklessTrip>& trips, const Polygon& boundary,
                  const CleanConfig& config) {
    if (config.loc_equality_radius_m < 0) {
        throw ConfigError("loc_equality_radius_m must be non-negative");
    }
    std::vector<TripView> views;
    views.reserve(trips.size());
    for (const RawDocklessTrip& t : trips) {
        TripView v;
        v.duration_s = static_cast<double>(t.end_time - t.start_time);
        v.cancelled = t.cancelled;
        v.same_location = haversine_m(t.start_point, t.end_point) < config.loc_equality_radius_m;
        v.start_point = t.start_point;
        v.end_point = t.end_point;
        v.cleaned.start_instant = t.start_time;
        v.cleaned.duration_s = v.duration_s;
        v.cleaned.start_loc = {std::nullopt, t.start_point};
        v.cleaned.end_loc = {std::nullopt, t.end_point};
        v.cleaned.label = std::nullopt;
        v.cleaned.vehicle_class = t.vehicle_class == RawVehicleClass::Scooter
                                      ? VehicleClass::Scooter
                                      : VehicleClass::DocklessBike;
        views.push_back(std::move(v));
    }
    return apply_rules(std::move(views), boundary);
}

CleanResult clean(const std::vector<CleanTrip>& trips, const Polygon& boundary,
                  const CleanConfig& config) {
    if (config.loc_equality_radius_m < 0) {
        throw ConfigError("loc_equality_radius_m must be non-negative");
    }
    std::vector<TripView> views;
    views.reserve(trips.size());
    for (const CleanTrip& t : trips) {
        TripView v;
        v.duration_s = t.duration_s;
        if (t.start_loc.station_id && t.end_loc.station_id) {
            v.same_location = *t.start_loc.station_id == *t.end_loc.station_id;
        } else {
            v.same_location =
                haversine_m(t.start_loc.point, t.end_loc.point) < config.loc_equality_radius_m;
        }
        v.start_point = t.start_loc.point;
        v.end_point = t.end_loc.point;
        v.cleaned = t;
        views.push_back(std::move(v));
    }
    return apply_rules(std::move(views), boundary);
}

void write_clean_trips_csv(std::ostream& out, const std::vector<CleanTrip>& trips,
                           const std::string& comment) {
    if (!comment.empty()) out << "# " << comment << '\n';
    out << "start_time,duration_s,start_station_id,start_lat,start_lon,"
           "end_station_id,end_lat,end_lon,label,vehicle_class\n";
    for (const CleanTrip& t : trips) {
        write_csv_row(out, {format_timestamp(t.start_instant), format_double(t.duration_s),
                            t.start_loc.station_id.value_or(""),
                            format_double(t.start_loc.point.lat),
                            format_double(t.start_loc.point.lon),
                            t.end_loc.station_id.value_or(""),
                            format_double(t.end_loc.point.lat),
                            format_double(t.end_loc.point.lon),
                            t.label ? to_string(*t.label) : "", to_string(t.vehicle_class)});
    }
}

std::vector<CleanTrip> read_clean_trips_csv(std::istream& in) {
    CsvReader reader(in);
    const std::vector<std::string> expected = {
        "start_time", "duration_s", "start_station_id", "start_lat", "start_lon",
        "end_station_id", "end_lat", "end_lon", "label", "vehicle_class"};
    if (reader.header() != expected) {
        throw ConfigError("cleaned-trips file: not in the canonical cleaned-trip format "
                          "(expected header start_time,duration_s,...)");
    }
    std::vector<CleanTrip> trips;
    std::vector<std::string> fields;
    std::size_t line_no = 0;
    while (reader.next(fields, line_no)) {
        if (fields.size() != 10) {
            throw DataError("cleaned-trips file: wrong field count at line " +
                            std::to_string(line_no));
        }
        CleanTrip t;
        const auto start = parse_timestamp(fields[0]);
        const auto duration = parse_number(fields[1]);
        const auto slat = parse_number(fields[3]);
        const auto slon = parse_number(fields[4]);
        const auto elat = parse_number(fields[6]);
        const auto elon = parse_number(fields[7]);
        if (!start || !duration || !slat || !slon || !elat || !elon) {
            throw DataError("cleaned-trips file: malformed row at line " +
                            std::to_string(line_no));
        }
        t.start_instant = *start;
        t.duration_s = *duration;
        t.start_loc.point = {*slat, *slon};
        t.end_loc.point = {*elat, *elon};
        if (!fields[2].empty()) t.start_loc.station_id = fields[2];
        if (!fields[5].empty()) t.end_loc.station_id = fields[5];
        if (fields[8] == "member") {
            t.label = UserType::Member;
        } else if (fields[8] == "casual") {
            t.label = UserType::Casual;
        } else if (!fields[8].empty()) {
            throw DataError("cleaned-trips file: unknown label at line " +
                            std::to_string(line_no));
        }
        if (fields[9] == "docked_bike") {
            t.vehicle_class = VehicleClass::DockedBike;
        } else if (fields[9] == "dockless_bike") {
            t.vehicle_class = VehicleClass::DocklessBike;
        } else if (fields[9] == "scooter") {
            t.vehicle_class = VehicleClass::Scooter;
        } else {
            throw DataError("cleaned-trips file: unknown vehicle_class at line " +
                            std::to_string(line_no));
        }
        trips.push_back(std::move(t));
    }
    return trips;
}

} // namespace mobility

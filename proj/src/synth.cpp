#include "mobility/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "json.hpp"

#include "mobility/csv.hpp"
#include "mobility/error.hpp"
#include "mobility/rng.hpp"
#include "profile_constants.hpp"

namespace mobility {

namespace pc = profile_constants;

namespace {

template <typename Container>
void normalize_weights(Container& w, const char* what) {
    double total = 0;
    for (double v : w) {
        if (!(v >= 0)) throw ConfigError(std::string(what) + ": negative weight");
        total += v;
    }
    if (total <= 0) throw ConfigError(std::string(what) + ": weights sum to zero");
    if (std::abs(total - 1.0) <= 1e-12) return; // keep already-normalised vectors bit-stable
    for (double& v : w) v /= total;
}

template <typename Container>
std::size_t categorical(const Container& weights, SplitMix64& rng) {
    const double u = uniform01(rng);
    double cum = 0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
        cum += weights[i];
        if (u < cum) return i;
    }
    return weights.size() - 1;
}

// Stations ranked by distance from the station centroid; rank 0 is the most
// central.
std::vector<std::size_t> centrality_ranks(const VoronoiPartition& partition) {
    LatLon centroid;
    for (const Station& s : partition.stations()) {
        centroid.lat += s.location.lat;
        centroid.lon += s.location.lon;
    }
    centroid.lat /= static_cast<double>(partition.size());
    centroid.lon /= static_cast<double>(partition.size());
    std::vector<std::size_t> order(partition.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return haversine_m(partition.stations()[a].location, centroid) <
               haversine_m(partition.stations()[b].location, centroid);
    });
    std::vector<std::size_t> rank(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;
    return rank;
}

// `mass` spread uniformly over the selected cells, remainder uniform over all.
std::vector<double> mixed_cell_weights(std::size_t cell_count, double mass,
                                       const std::vector<bool>& selected,
                                       std::size_t selected_count) {
    std::vector<double> w(cell_count, (1.0 - mass) / static_cast<double>(cell_count));
    if (selected_count == 0) return w;
    for (std::size_t i = 0; i < cell_count; ++i) {
        if (selected[i]) w[i] += mass / static_cast<double>(selected_count);
    }
    return w;
}

struct SpatialSets {
    std::vector<bool> core, central, outer, ring;
    std::size_t core_n = 0, central_n = 0, outer_n = 0, ring_n = 0;
};

SpatialSets spatial_sets(const VoronoiPartition& partition) {
    const std::vector<std::size_t> rank = centrality_ranks(partition);
    const std::size_t c = partition.size();
    const auto at_least_one = [&](double fraction) {
        return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(
                                            fraction * static_cast<double>(c))));
    };
    SpatialSets sets;
    sets.core.resize(c);
    sets.central.resize(c);
    sets.outer.resize(c);
    sets.ring.resize(c);
    const std::size_t core_k = at_least_one(pc::kCoreCellFraction);
    const std::size_t central_k = at_least_one(pc::kCentralCellFraction);
    const std::size_t outer_k = at_least_one(pc::kOuterCellFraction);
    for (std::size_t i = 0; i < c; ++i) {
        sets.core[i] = rank[i] < core_k;
        sets.central[i] = rank[i] < central_k;
        sets.outer[i] = rank[i] >= c - outer_k;
        sets.ring[i] = rank[i] >= c / 3 && rank[i] < 2 * c / 3;
    }
    sets.core_n = core_k;
    sets.central_n = central_k;
    sets.outer_n = outer_k;
    sets.ring_n = 2 * c / 3 - c / 3;
    if (sets.ring_n == 0) {
        sets.ring = sets.central;
        sets.ring_n = central_k;
    }
    return sets;
}

void finalize_profile(CohortProfile& p) {
    normalize_weights(p.day_weights, "day_weights");
    normalize_weights(p.weekday_hour_weights, "weekday_hour_weights");
    normalize_weights(p.weekend_hour_weights, "weekend_hour_weights");
    normalize_weights(p.start_cells.am, "start_cells.am");
    normalize_weights(p.start_cells.pm, "start_cells.pm");
    normalize_weights(p.end_cells.am, "end_cells.am");
    normalize_weights(p.end_cells.pm, "end_cells.pm");
    if (!(p.duration_median_min > 1.0)) {
        throw ConfigError("profile " + p.name + ": duration median must exceed 1 minute");
    }
}

} // namespace

DefaultProfiles default_profiles(const VoronoiPartition& partition) {
    const SpatialSets sets = spatial_sets(partition);
    const std::size_t c = partition.size();
    const auto mix = [&](double mass, const std::vector<bool>& sel, std::size_t sel_n) {
        return mixed_cell_weights(c, mass, sel, sel_n);
    };

    DefaultProfiles profiles;

    CohortProfile& commuter = profiles.commuter;
    commuter.name = "commuter";
    commuter.label = UserType::Member;
    commuter.vehicle_class = VehicleClass::DockedBike;
    commuter.day_weights = pc::kCommuterDays;
    commuter.weekday_hour_weights = pc::kCommuterWeekdayHours;
    commuter.weekend_hour_weights = pc::kCommuterWeekendHours;
    commuter.duration_median_min = pc::kCommuterMedianMin;
    commuter.duration_sigma = pc::kCommuterSigma;
    commuter.start_cells.am = mix(pc::kCommuterHomeEndMass, sets.outer, sets.outer_n);
    commuter.start_cells.pm = mix(pc::kCommuterWorkEndMass, sets.central, sets.central_n);
    commuter.end_cells.am = mix(pc::kCommuterWorkEndMass, sets.central, sets.central_n);
    commuter.end_cells.pm = mix(pc::kCommuterHomeEndMass, sets.outer, sets.outer_n);

    CohortProfile& recreational = profiles.recreational;
    recreational.name = "recreational";
    recreational.label = UserType::Casual;
    recreational.vehicle_class = VehicleClass::DockedBike;
    recreational.day_weights = pc::kRecreationalDays;
    recreational.weekday_hour_weights = pc::kRecreationalWeekdayHours;
    recreational.weekend_hour_weights = pc::kRecreationalWeekendHours;
    recreational.duration_median_min = pc::kRecreationalMedianMin;
    recreational.duration_sigma = pc::kRecreationalSigma;
    recreational.start_cells.am = mix(pc::kRecreationalStartMass, sets.core, sets.core_n);
    recreational.start_cells.pm = recreational.start_cells.am;
    recreational.end_cells.am = mix(pc::kRecreationalEndMass, sets.core, sets.core_n);
    recreational.end_cells.pm = recreational.end_cells.am;

    CohortProfile& bike = profiles.dockless_bike;
    bike.name = "dockless_bike";
    bike.label = std::nullopt;
    bike.vehicle_class = VehicleClass::DocklessBike;
    bike.day_weights = pc::kDocklessBikeDays;
    bike.weekday_hour_weights = pc::kDocklessBikeWeekdayHours;
    bike.weekend_hour_weights = pc::kDocklessBikeWeekendHours;
    bike.duration_median_min = pc::kDocklessBikeMedianMin;
    bike.duration_sigma = pc::kDocklessBikeSigma;
    bike.start_cells.am = mix(pc::kDocklessBikeCentralMass, sets.central, sets.central_n);
    bike.start_cells.pm = bike.start_cells.am;
    bike.end_cells = bike.start_cells;

    CohortProfile& scooter = profiles.scooter;
    scooter.name = "scooter";
    scooter.label = std::nullopt;
    scooter.vehicle_class = VehicleClass::Scooter;
    scooter.day_weights = pc::kScooterDays;
    scooter.weekday_hour_weights = pc::kScooterWeekdayHours;
    scooter.weekend_hour_weights = pc::kScooterWeekendHours;
    scooter.duration_median_min = pc::kScooterMedianMin;
    scooter.duration_sigma = pc::kScooterSigma;
    scooter.start_cells.am = mix(pc::kScooterRingStartMass, sets.ring, sets.ring_n);
    scooter.start_cells.pm = mix(pc::kScooterCentralEndMass, sets.central, sets.central_n);
    scooter.end_cells.am = mix(pc::kScooterCentralEndMass, sets.central, sets.central_n);
    scooter.end_cells.pm = mix(pc::kScooterRingStartMass, sets.ring, sets.ring_n);

    finalize_profile(profiles.commuter);
    finalize_profile(profiles.recreational);
    finalize_profile(profiles.dockless_bike);
    finalize_profile(profiles.scooter);
    return profiles;
}

std::vector<CleanTrip> generate(const CohortProfile& profile, std::size_t n, std::uint64_t seed,
                                const VoronoiPartition& partition) {
    if (profile.start_cells.am.size() != partition.size() ||
        profile.end_cells.am.size() != partition.size()) {
        throw ConfigError("profile " + profile.name + ": cell weights do not match partition");
    }

    // Candidate dates in the generation window, bucketed by weekday, so the
    // empirical day-of-week distribution equals the profile weights.
    const CivilSeconds window_start =
        to_seconds({pc::kWindowStartYear, pc::kWindowStartMonth, pc::kWindowStartDay, 0, 0, 0});
    const CivilSeconds window_end =
        to_seconds({pc::kWindowEndYear, pc::kWindowEndMonth, pc::kWindowEndDay, 0, 0, 0});
    std::array<std::vector<CivilSeconds>, 7> dates_by_weekday;
    for (CivilSeconds day = window_start; day <= window_end; day += 86'400) {
        dates_by_weekday[weekday(day)].push_back(day);
    }

    const double mu = std::log(profile.duration_median_min * 60.0);

    std::vector<CleanTrip> trips;
    trips.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        SplitMix64 rng(derive_seed(seed, i));

        const std::size_t day = categorical(profile.day_weights, rng);
        const std::vector<CivilSeconds>& dates = dates_by_weekday[day];
        const CivilSeconds date = dates[bounded(rng, dates.size())];
        const bool weekend = day >= 5;
        const std::size_t hour = categorical(
            weekend ? profile.weekend_hour_weights : profile.weekday_hour_weights, rng);
        const std::size_t minute = bounded(rng, 60);

        CleanTrip trip;
        trip.start_instant = date + static_cast<CivilSeconds>(hour * 3'600 + minute * 60);

        double duration = 0;
        for (int attempt = 0; attempt < 64; ++attempt) {
            duration = std::exp(mu + profile.duration_sigma * standard_normal(rng));
            if (duration >= 60.0 && duration <= 86'400.0) break;
        }
        duration = std::clamp(std::round(duration), 60.0, 86'400.0);

        const bool am = hour < 12;
        const std::vector<double>& start_w = am ? profile.start_cells.am : profile.start_cells.pm;
        const std::vector<double>& end_w = am ? profile.end_cells.am : profile.end_cells.pm;
        const std::size_t start_cell = categorical(start_w, rng);
        std::size_t end_cell = categorical(end_w, rng);

        const auto jitter = [&](LatLon base) -> LatLon {
            const double r = pc::kJitterRadiusM * std::sqrt(uniform01(rng));
            const double theta = 2.0 * std::numbers::pi * uniform01(rng);
            const double rad_to_deg = 180.0 / std::numbers::pi;
            const double dlat = (r * std::sin(theta) / kEarthRadiusM) * rad_to_deg;
            const double dlon = (r * std::cos(theta) /
                                 (kEarthRadiusM * std::cos(base.lat * std::numbers::pi / 180.0))) *
                                rad_to_deg;
            return {base.lat + dlat, base.lon + dlon};
        };
        const LatLon start_point = jitter(partition.stations()[start_cell].location);
        LatLon end_point = jitter(partition.stations()[end_cell].location);
        if (duration < 120.0) {
            // Short trips must not trip the same-location exclusion, neither
            // as raw points nor once snapped back to their nearest stations.
            bool distinct = false;
            for (int attempt = 0; attempt < 64 && !distinct; ++attempt) {
                distinct = haversine_m(start_point, end_point) >= 15.0 &&
                           partition.cell_index(start_point) != partition.cell_index(end_point);
                if (!distinct) {
                    end_cell = categorical(end_w, rng);
                    end_point = jitter(partition.stations()[end_cell].location);
                }
            }
            if (!distinct) duration = 120.0;
        }
        trip.duration_s = duration;
        trip.start_loc = {std::nullopt, start_point};
        trip.end_loc = {std::nullopt, end_point};
        trip.label = profile.label;
        trip.vehicle_class = profile.vehicle_class;
        trips.push_back(std::move(trip));
    }
    return trips;
}

Bbox fixture_bbox() {
    return {pc::kFixtureMinLat, pc::kFixtureMinLon, pc::kFixtureMaxLat, pc::kFixtureMaxLon};
}

std::vector<Station> fixture_stations(std::size_t count, std::uint64_t seed) {
    if (count == 0) throw ConfigError("fixture_stations: count must be positive");
    const Bbox box = fixture_bbox();
    const auto cols = static_cast<std::size_t>(
        std::ceil(std::sqrt(static_cast<double>(count))));
    const std::size_t rows = (count + cols - 1) / cols;
    const double dlon = (box.max_lon - box.min_lon) / static_cast<double>(cols);
    const double dlat = (box.max_lat - box.min_lat) / static_cast<double>(rows);

    std::size_t width = 1;
    for (std::size_t v = count; v >= 10; v /= 10) ++width;
    const auto padded = [width](char prefix, std::size_t v) {
        std::string digits = std::to_string(v);
        return prefix + std::string(width > digits.size() ? width - digits.size() : 0, '0') +
               digits;
    };

    std::vector<Station> stations;
    stations.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        SplitMix64 rng(derive_seed(seed, i));
        const std::size_t r = i / cols;
        const std::size_t c = i % cols;
        Station s;
        s.id = padded('S', i + 1);
        s.name = std::string("Station ") + std::to_string(i + 1);
        s.location.lat = box.min_lat + (static_cast<double>(r) + 0.5) * dlat +
                         (uniform01(rng) - 0.5) * 2.0 * pc::kFixtureJitterFraction * dlat;
        s.location.lon = box.min_lon + (static_cast<double>(c) + 0.5) * dlon +
                         (uniform01(rng) - 0.5) * 2.0 * pc::kFixtureJitterFraction * dlon;
        stations.push_back(std::move(s));
    }
    return stations;
}

Polygon fixture_boundary() {
    const Bbox box = fixture_bbox();
    const double pad = pc::kFixtureBoundaryPadDeg;
    return Polygon({{box.min_lat - pad, box.min_lon - pad},
                    {box.min_lat - pad, box.max_lon + pad},
                    {box.max_lat + pad, box.max_lon + pad},
                    {box.max_lat + pad, box.min_lon - pad}});
}

ZoneSet fixture_zones(int rows, int cols) {
    if (rows < 1 || cols < 1) throw ConfigError("fixture_zones: rows and cols must be positive");
    const Bbox box = fixture_bbox();
    const double dlat = (box.max_lat - box.min_lat) / rows;
    const double dlon = (box.max_lon - box.min_lon) / cols;
    std::size_t width = 1;
    for (int v = rows * cols; v >= 10; v /= 10) ++width;
    const auto padded = [width](int v) {
        std::string digits = std::to_string(v);
        return 'Z' + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
    };
    std::vector<Zone> zones;
    zones.reserve(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
    int n = 0;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const double lat0 = box.min_lat + r * dlat;
            const double lon0 = box.min_lon + c * dlon;
            zones.push_back(Zone{padded(++n), Polygon({{lat0, lon0},
                                              {lat0, lon0 + dlon},
                                              {lat0 + dlat, lon0 + dlon},
                                              {lat0 + dlat, lon0}})});
        }
    }
    return ZoneSet(std::move(zones));
}

void write_docked_csv(std::ostream& out, const std::vector<CleanTrip>& trips,
                      const VoronoiPartition& partition, const std::string& comment) {
    if (!comment.empty()) out << "# " << comment << '\n';
    out << "start_time,end_time,start_station_id,end_station_id,user_type,vehicle_id\n";
    std::size_t i = 0;
    for (const CleanTrip& t : trips) {
        const CivilSeconds end =
            t.start_instant + static_cast<CivilSeconds>(std::llround(t.duration_s));
        const std::string start_id = t.start_loc.station_id
                                         ? *t.start_loc.station_id
                                         : partition.assign_cell(t.start_loc.point);
        const std::string end_id = t.end_loc.station_id ? *t.end_loc.station_id
                                                        : partition.assign_cell(t.end_loc.point);
        write_csv_row(out, {format_timestamp(t.start_instant), format_timestamp(end), start_id,
                            end_id, t.label ? to_string(*t.label) : "casual",
                            "v" + std::to_string(++i)});
    }
}

void write_dockless_csv(std::ostream& out, const std::vector<CleanTrip>& trips,
                        const std::string& comment) {
    if (!comment.empty()) out << "# " << comment << '\n';
    out << "start_time,end_time,start_lat,start_lon,end_lat,end_lon,operator,vehicle_class,"
           "cancelled\n";
    for (const CleanTrip& t : trips) {
        const CivilSeconds end =
            t.start_instant + static_cast<CivilSeconds>(std::llround(t.duration_s));
        write_csv_row(out, {format_timestamp(t.start_instant), format_timestamp(end),
                            format_double(t.start_loc.point.lat),
                            format_double(t.start_loc.point.lon),
                            format_double(t.end_loc.point.lat),
                            format_double(t.end_loc.point.lon), "synth",
                            t.vehicle_class == VehicleClass::Scooter ? "scooter" : "bike", "0"});
    }
}

std::string CohortProfile::to_json() const {
    nlohmann::json doc;
    doc["name"] = name;
    doc["label"] = label ? nlohmann::json(to_string(*label)) : nlohmann::json(nullptr);
    doc["vehicle_class"] = mobility::to_string(vehicle_class);
    doc["day_weights"] = day_weights;
    doc["weekday_hour_weights"] = weekday_hour_weights;
    doc["weekend_hour_weights"] = weekend_hour_weights;
    doc["duration_median_min"] = duration_median_min;
    doc["duration_sigma"] = duration_sigma;
    doc["start_cells"] = {{"am", start_cells.am}, {"pm", start_cells.pm}};
    doc["end_cells"] = {{"am", end_cells.am}, {"pm", end_cells.pm}};
    return doc.dump(2);
}

CohortProfile CohortProfile::from_json(const std::string& text) {
    try {
        const nlohmann::json doc = nlohmann::json::parse(text);
        CohortProfile p;
        p.name = doc.at("name").get<std::string>();
        if (!doc.at("label").is_null()) {
            const std::string label = doc.at("label").get<std::string>();
            if (label == "member") p.label = UserType::Member;
            else if (label == "casual") p.label = UserType::Casual;
            else throw ConfigError("profile: unknown label " + label);
        }
        const std::string cls = doc.at("vehicle_class").get<std::string>();
        if (cls == "docked_bike") p.vehicle_class = VehicleClass::DockedBike;
        else if (cls == "dockless_bike") p.vehicle_class = VehicleClass::DocklessBike;
        else if (cls == "scooter") p.vehicle_class = VehicleClass::Scooter;
        else throw ConfigError("profile: unknown vehicle_class " + cls);
        p.day_weights = doc.at("day_weights").get<std::array<double, 7>>();
        p.weekday_hour_weights = doc.at("weekday_hour_weights").get<std::array<double, 24>>();
        p.weekend_hour_weights = doc.at("weekend_hour_weights").get<std::array<double, 24>>();
        p.duration_median_min = doc.at("duration_median_min").get<double>();
        p.duration_sigma = doc.at("duration_sigma").get<double>();
        p.start_cells.am = doc.at("start_cells").at("am").get<std::vector<double>>();
        p.start_cells.pm = doc.at("start_cells").at("pm").get<std::vector<double>>();
        p.end_cells.am = doc.at("end_cells").at("am").get<std::vector<double>>();
        p.end_cells.pm = doc.at("end_cells").at("pm").get<std::vector<double>>();
        finalize_profile(p);
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid profile JSON: ") + e.what());
    }
}

} // namespace mobility

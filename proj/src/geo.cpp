#include "mobility/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "mobility/csv.hpp"
#include "mobility/error.hpp"

namespace mobility {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

struct XY {
    double x = 0, y = 0;
};

double cross(const XY& o, const XY& a, const XY& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment_xy(const XY& p, const XY& a, const XY& b) {
    if (cross(a, b, p) != 0.0) return false;
    return p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) && p.y >= std::min(a.y, b.y) &&
           p.y <= std::max(a.y, b.y);
}

int sign(double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

// Closed-segment intersection test, touching included.
bool segments_intersect(const XY& p1, const XY& p2, const XY& p3, const XY& p4) {
    const int d1 = sign(cross(p3, p4, p1));
    const int d2 = sign(cross(p3, p4, p2));
    const int d3 = sign(cross(p1, p2, p3));
    const int d4 = sign(cross(p1, p2, p4));
    if (d1 != d2 && d3 != d4) return true;
    if (d1 == 0 && on_segment_xy(p1, p3, p4)) return true;
    if (d2 == 0 && on_segment_xy(p2, p3, p4)) return true;
    if (d3 == 0 && on_segment_xy(p3, p1, p2)) return true;
    if (d4 == 0 && on_segment_xy(p4, p1, p2)) return true;
    return false;
}

XY to_xy(LatLon p) { return {p.lon, p.lat}; }

} // namespace

bool valid_coordinates(LatLon p) {
    return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 &&
           p.lon >= -180.0 && p.lon <= 180.0;
}

double haversine_m(LatLon a, LatLon b) {
    const double phi1 = a.lat * kDegToRad;
    const double phi2 = b.lat * kDegToRad;
    const double dphi = (b.lat - a.lat) * kDegToRad;
    const double dlam = (b.lon - a.lon) * kDegToRad;
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlam / 2.0);
    const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

Polygon::Polygon(std::vector<LatLon> ring) : ring_(std::move(ring)) {
    const std::size_t n = ring_.size();
    if (n < 3) throw ConfigError("polygon needs at least 3 vertices");
    for (std::size_t i = 0; i < n; ++i) {
        if (ring_[i] == ring_[(i + 1) % n]) {
            throw ConfigError("polygon has repeated consecutive vertices");
        }
    }
    // Simplicity: no two non-adjacent edges may intersect, touching included.
    for (std::size_t i = 0; i < n; ++i) {
        const XY a1 = to_xy(ring_[i]);
        const XY a2 = to_xy(ring_[(i + 1) % n]);
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) continue;
            const XY b1 = to_xy(ring_[j]);
            const XY b2 = to_xy(ring_[(j + 1) % n]);
            if (segments_intersect(a1, a2, b1, b2)) {
                throw ConfigError("polygon is self-intersecting");
            }
        }
    }
}

bool Polygon::contains(LatLon p) const {
    const XY q = to_xy(p);
    const std::size_t n = ring_.size();
    bool inside = false;
    for (std::size_t i = 0; i < n; ++i) {
        const XY a = to_xy(ring_[i]);
        const XY b = to_xy(ring_[(i + 1) % n]);
        if (on_segment_xy(q, a, b)) return true; // boundary counts as inside
        if ((a.y > q.y) != (b.y > q.y)) {
            const double x_int = a.x + (q.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (q.x < x_int) inside = !inside;
        }
    }
    return inside;
}

ZoneSet::ZoneSet(std::vector<Zone> zones) : zones_(std::move(zones)) {
    for (std::size_t i = 0; i < zones_.size(); ++i) {
        for (std::size_t j = i + 1; j < zones_.size(); ++j) {
            if (zones_[i].id == zones_[j].id) {
                throw ConfigError("duplicate zone id: " + zones_[i].id);
            }
        }
    }
}

std::optional<std::string> ZoneSet::assign(LatLon p) const {
    for (const Zone& z : zones_) {
        if (z.polygon.contains(p)) return z.id;
    }
    return std::nullopt;
}

StationIndex make_station_index(const std::vector<Station>& stations) {
    StationIndex index;
    for (const Station& s : stations) index.emplace(s.id, s);
    return index;
}

VoronoiPartition VoronoiPartition::build(std::vector<Station> stations) {
    if (stations.empty()) throw DataError("partition needs at least one station");
    for (std::size_t i = 0; i < stations.size(); ++i) {
        if (!valid_coordinates(stations[i].location)) {
            throw DataError("station " + stations[i].id + " has invalid coordinates");
        }
        for (std::size_t j = i + 1; j < stations.size(); ++j) {
            if (stations[i].location == stations[j].location) {
                throw DataError("stations at identical coordinates: " + stations[i].id + ", " +
                                stations[j].id);
            }
        }
    }
    VoronoiPartition p;
    p.stations_ = std::move(stations);
    return p;
}

std::size_t VoronoiPartition::cell_index(LatLon p) const {
    std::size_t best = 0;
    double best_d = haversine_m(p, stations_[0].location);
    for (std::size_t i = 1; i < stations_.size(); ++i) {
        const double d = haversine_m(p, stations_[i].location);
        if (d < best_d || (d == best_d && stations_[i].id < stations_[best].id)) {
            best = i;
            best_d = d;
        }
    }
    return best;
}

const std::string& VoronoiPartition::assign_cell(LatLon p) const {
    return stations_[cell_index(p)].id;
}

std::vector<std::vector<LatLon>> VoronoiPartition::export_cells(const Bbox& bbox) const {
    for (const Station& s : stations_) {
        if (!bbox.contains(s.location)) {
            throw ConfigError("station " + s.id + " lies outside the export bbox");
        }
    }
    double lat0 = 0, lon0 = 0;
    for (const Station& s : stations_) {
        lat0 += s.location.lat;
        lon0 += s.location.lon;
    }
    lat0 /= static_cast<double>(stations_.size());
    lon0 /= static_cast<double>(stations_.size());
    const double kx = kDegToRad * kEarthRadiusM * std::cos(lat0 * kDegToRad);
    const double ky = kDegToRad * kEarthRadiusM;
    const auto project = [&](LatLon p) -> XY {
        return {(p.lon - lon0) * kx, (p.lat - lat0) * ky};
    };
    const auto unproject = [&](XY q) -> LatLon {
        return {q.y / ky + lat0, q.x / kx + lon0};
    };

    const std::vector<XY> rect = {project({bbox.min_lat, bbox.min_lon}),
                                  project({bbox.min_lat, bbox.max_lon}),
                                  project({bbox.max_lat, bbox.max_lon}),
                                  project({bbox.max_lat, bbox.min_lon})};
    std::vector<XY> sites(stations_.size());
    for (std::size_t i = 0; i < stations_.size(); ++i) sites[i] = project(stations_[i].location);

    std::vector<std::vector<LatLon>> cells;
    cells.reserve(stations_.size());
    for (std::size_t i = 0; i < stations_.size(); ++i) {
        std::vector<XY> poly = rect;
        for (std::size_t j = 0; j < stations_.size() && !poly.empty(); ++j) {
            if (j == i) continue;
            // Keep the half-plane closer to site i: 2(sj - si) . p <= |sj|^2 - |si|^2.
            const double ax = sites[j].x - sites[i].x;
            const double ay = sites[j].y - sites[i].y;
            const double c = 0.5 * (sites[j].x * sites[j].x + sites[j].y * sites[j].y -
                                    sites[i].x * sites[i].x - sites[i].y * sites[i].y);
            std::vector<XY> clipped;
            const std::size_t m = poly.size();
            for (std::size_t k = 0; k < m; ++k) {
                const XY& u = poly[k];
                const XY& v = poly[(k + 1) % m];
                const double du = ax * u.x + ay * u.y - c;
                const double dv = ax * v.x + ay * v.y - c;
                if (du <= 0) clipped.push_back(u);
                if ((du < 0 && dv > 0) || (du > 0 && dv < 0)) {
                    const double t = du / (du - dv);
                    clipped.push_back({u.x + t * (v.x - u.x), u.y + t * (v.y - u.y)});
                }
            }
            poly = std::move(clipped);
        }
        std::vector<LatLon> ring;
        ring.reserve(poly.size());
        for (const XY& q : poly) ring.push_back(unproject(q));
        cells.push_back(std::move(ring));
    }
    return cells;
}

double polygon_ring_area(const std::vector<std::pair<double, double>>& xy) {
    double a = 0;
    const std::size_t n = xy.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& [x1, y1] = xy[i];
        const auto& [x2, y2] = xy[(i + 1) % n];
        a += x1 * y2 - x2 * y1;
    }
    return std::abs(a) / 2.0;
}

// --- file formats ---

std::vector<Station> read_stations_csv(std::istream& in) {
    CsvReader reader(in);
    const auto id_col = reader.column("id");
    const auto name_col = reader.column("name");
    const auto lat_col = reader.column("lat");
    const auto lon_col = reader.column("lon");
    if (!id_col) throw ConfigError("stations file: missing required column: id");
    if (!lat_col) throw ConfigError("stations file: missing required column: lat");
    if (!lon_col) throw ConfigError("stations file: missing required column: lon");

    std::vector<Station> stations;
    std::vector<std::string> fields;
    std::size_t line_no = 0;
    while (reader.next(fields, line_no)) {
        Station s;
        try {
            s.id = fields.at(*id_col);
            s.name = name_col ? fields.at(*name_col) : "";
            s.location.lat = std::stod(fields.at(*lat_col));
            s.location.lon = std::stod(fields.at(*lon_col));
        } catch (const std::exception&) {
            throw DataError("stations file: malformed row at line " + std::to_string(line_no));
        }
        if (s.id.empty()) {
            throw DataError("stations file: empty station id at line " + std::to_string(line_no));
        }
        stations.push_back(std::move(s));
    }
    return stations;
}

void write_stations_csv(std::ostream& out, const std::vector<Station>& stations,
                        const std::string& comment) {
    if (!comment.empty()) out << "# " << comment << '\n';
    out << "id,name,lat,lon\n";
    for (const Station& s : stations) {
        write_csv_row(out, {s.id, s.name, format_double(s.location.lat),
                            format_double(s.location.lon)});
    }
}

namespace {

using nlohmann::json;

std::vector<LatLon> ring_from_geojson(const json& coords) {
    if (!coords.is_array() || coords.empty() || !coords[0].is_array()) {
        throw ConfigError("GeoJSON polygon: malformed coordinates");
    }
    std::vector<LatLon> ring;
    for (const auto& pt : coords[0]) { // outer ring only
        if (!pt.is_array() || pt.size() < 2) {
            throw ConfigError("GeoJSON polygon: malformed position");
        }
        ring.push_back({pt[1].get<double>(), pt[0].get<double>()});
    }
    if (ring.size() >= 2 && ring.front() == ring.back()) ring.pop_back();
    return ring;
}

json ring_to_geojson(const std::vector<LatLon>& ring) {
    json coords = json::array();
    for (const LatLon& p : ring) coords.push_back({p.lon, p.lat});
    if (!ring.empty()) coords.push_back({ring.front().lon, ring.front().lat});
    return json::array({coords});
}

json parse_geojson(std::istream& in) {
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid GeoJSON: ") + e.what());
    }
    return doc;
}

} // namespace

Polygon read_boundary_geojson(std::istream& in) {
    const json doc = parse_geojson(in);
    if (doc.value("type", "") == "FeatureCollection") {
        for (const auto& f : doc.at("features")) {
            const auto& g = f.at("geometry");
            if (g.value("type", "") == "Polygon") {
                return Polygon(ring_from_geojson(g.at("coordinates")));
            }
        }
        throw ConfigError("boundary GeoJSON contains no Polygon feature");
    }
    if (doc.value("type", "") == "Feature") {
        return Polygon(ring_from_geojson(doc.at("geometry").at("coordinates")));
    }
    if (doc.value("type", "") == "Polygon") {
        return Polygon(ring_from_geojson(doc.at("coordinates")));
    }
    throw ConfigError("boundary GeoJSON: expected FeatureCollection, Feature or Polygon");
}

ZoneSet read_zones_geojson(std::istream& in) {
    const json doc = parse_geojson(in);
    if (doc.value("type", "") != "FeatureCollection") {
        throw ConfigError("zones GeoJSON: expected a FeatureCollection");
    }
    std::vector<Zone> zones;
    for (const auto& f : doc.at("features")) {
        const auto& g = f.at("geometry");
        if (g.value("type", "") != "Polygon") {
            throw ConfigError("zones GeoJSON: every feature must be a Polygon");
        }
        const auto& props = f.at("properties");
        if (!props.contains("zone_id")) {
            throw ConfigError("zones GeoJSON: feature missing zone_id property");
        }
        std::string id = props.at("zone_id").is_string()
                             ? props.at("zone_id").get<std::string>()
                             : props.at("zone_id").dump();
        zones.push_back(Zone{std::move(id), Polygon(ring_from_geojson(g.at("coordinates")))});
    }
    return ZoneSet(std::move(zones));
}

std::string zones_to_geojson(const ZoneSet& zones) {
    json features = json::array();
    for (const Zone& z : zones.zones()) {
        features.push_back({{"type", "Feature"},
                            {"properties", {{"zone_id", z.id}}},
                            {"geometry",
                             {{"type", "Polygon"},
                              {"coordinates", ring_to_geojson(z.polygon.ring())}}}});
    }
    return json{{"type", "FeatureCollection"}, {"features", features}}.dump(2);
}

std::string boundary_to_geojson(const Polygon& boundary) {
    json feature = {{"type", "Feature"},
                    {"properties", json::object()},
                    {"geometry",
                     {{"type", "Polygon"}, {"coordinates", ring_to_geojson(boundary.ring())}}}};
    return json{{"type", "FeatureCollection"}, {"features", json::array({feature})}}.dump(2);
}

std::string cells_to_geojson(const VoronoiPartition& partition, const Bbox& bbox) {
    const auto cells = partition.export_cells(bbox);
    json features = json::array();
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const Station& s = partition.stations()[i];
        features.push_back({{"type", "Feature"},
                            {"properties", {{"station_id", s.id}, {"name", s.name}}},
                            {"geometry",
                             {{"type", "Polygon"}, {"coordinates", ring_to_geojson(cells[i])}}}});
    }
    return json{{"type", "FeatureCollection"}, {"features", features}}.dump(2);
}

} // namespace mobility

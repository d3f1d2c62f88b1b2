#pragma once

#include <istream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace mobility {

inline constexpr double kEarthRadiusM = 6'371'000.0;

struct LatLon {
    double lat = 0.0;
    double lon = 0.0;
    bool operator==(const LatLon&) const = default;
};

bool valid_coordinates(LatLon p);

/// Great-circle distance in meters.
double haversine_m(LatLon a, LatLon b);

/// Simple (non-self-intersecting) closed ring; the closing edge back to the
/// first vertex is implicit.
class Polygon {
public:
    /// Throws ConfigError on fewer than 3 vertices, repeated consecutive
    /// vertices, or self-intersection.
    explicit Polygon(std::vector<LatLon> ring);

    /// Ray-casting containment; points on an edge or vertex count as inside.
    bool contains(LatLon p) const;

    const std::vector<LatLon>& ring() const { return ring_; }

private:
    std::vector<LatLon> ring_;
};

struct Zone {
    std::string id;
    Polygon polygon;
};

/// Zones in file order; used only for descriptive aggregation.
class ZoneSet {
public:
    ZoneSet() = default;
    explicit ZoneSet(std::vector<Zone> zones);

    /// First zone in file order containing the point, boundary inclusive.
    std::optional<std::string> assign(LatLon p) const;

    const std::vector<Zone>& zones() const { return zones_; }

private:
    std::vector<Zone> zones_;
};

struct Station {
    std::string id;
    std::string name;
    LatLon location;
};

using StationIndex = std::unordered_map<std::string, Station>;
StationIndex make_station_index(const std::vector<Station>& stations);

struct Bbox {
    double min_lat = 0, min_lon = 0, max_lat = 0, max_lon = 0;
    bool contains(LatLon p) const {
        return p.lat >= min_lat && p.lat <= max_lat && p.lon >= min_lon && p.lon <= max_lon;
    }
};

/// Nearest-station partition of the plane. Feature extraction queries it via
/// cell_index/assign_cell (exact haversine nearest neighbour, ties broken by
/// lexicographically smallest station id); explicit cell polygons exist only
/// for export.
class VoronoiPartition {
public:
    /// Throws DataError when empty or when two stations share exact
    /// coordinates (the error names the colliding ids).
    static VoronoiPartition build(std::vector<Station> stations);

    std::size_t size() const { return stations_.size(); }
    const std::vector<Station>& stations() const { return stations_; }

    std::size_t cell_index(LatLon p) const;
    const std::string& assign_cell(LatLon p) const;

    /// Planar Voronoi polygons on equirectangular-projected coordinates,
    /// clipped to bbox, one ring per station in station order. The projection
    /// is centred on the station centroid and is approximate at city scale.
    /// Throws ConfigError if any station lies outside bbox.
    std::vector<std::vector<LatLon>> export_cells(const Bbox& bbox) const;

private:
    VoronoiPartition() = default;
    std::vector<Station> stations_;
};

double polygon_ring_area(const std::vector<std::pair<double, double>>& xy);

// --- file formats ---

/// Delimited text with header columns id,name,lat,lon (extra columns ignored).
std::vector<Station> read_stations_csv(std::istream& in);
void write_stations_csv(std::ostream& out, const std::vector<Station>& stations,
                        const std::string& comment = "");

/// GeoJSON FeatureCollection of Polygons. The boundary reader takes the first
/// polygon feature; the zone reader requires a zone_id property per feature.
Polygon read_boundary_geojson(std::istream& in);
ZoneSet read_zones_geojson(std::istream& in);
std::string zones_to_geojson(const ZoneSet& zones);
std::string boundary_to_geojson(const Polygon& boundary);
std::string cells_to_geojson(const VoronoiPartition& partition, const Bbox& bbox);

} // namespace mobility

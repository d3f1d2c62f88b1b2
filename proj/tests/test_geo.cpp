#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mobility/error.hpp"
#include "mobility/geo.hpp"
#include "mobility/rng.hpp"
#include "mobility/synth.hpp"

using namespace mobility;

TEST_CASE("haversine basics") {
    CHECK(haversine_m({38.9, -77.0}, {38.9, -77.0}) == 0.0);
    // One degree of latitude on the sphere model.
    const double one_deg = haversine_m({0.0, 0.0}, {1.0, 0.0});
    CHECK(one_deg == doctest::Approx(kEarthRadiusM * std::numbers::pi / 180.0).epsilon(1e-9));
}

TEST_CASE("polygon containment: unit square") {
    const Polygon square({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
    CHECK(square.contains({0.5, 0.5}));
    CHECK_FALSE(square.contains({2, 2}));
    CHECK(square.contains({0, 0}));     // vertex
    CHECK(square.contains({0, 0.5}));   // edge midpoint
    CHECK(square.contains({0.5, 1.0})); // edge midpoint
}

TEST_CASE("polygon validation") {
    CHECK_THROWS_AS(Polygon({{0, 0}, {1, 1}}), ConfigError);
    CHECK_THROWS_AS(Polygon({{0, 0}, {0, 0}, {1, 1}}), ConfigError);
    // Bowtie.
    CHECK_THROWS_AS(Polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), ConfigError);
}

namespace {

// Convexity oracle: point is inside a convex polygon iff it sits on the same
// side of every edge (boundary inclusive), whichever way the ring winds.
bool convex_contains(const std::vector<LatLon>& ring, LatLon p) {
    const std::size_t n = ring.size();
    bool any_pos = false, any_neg = false;
    for (std::size_t i = 0; i < n; ++i) {
        const LatLon& a = ring[i];
        const LatLon& b = ring[(i + 1) % n];
        const double cross =
            (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon);
        any_pos = any_pos || cross > 0;
        any_neg = any_neg || cross < 0;
    }
    return !(any_pos && any_neg);
}

} // namespace

TEST_CASE("polygon containment agrees with half-plane oracle on a convex fixture") {
    // Irregular convex hexagon, CCW in (lon, lat).
    const std::vector<LatLon> ring = {{0.0, 0.2},  {0.45, 0.0}, {0.95, 0.25},
                                      {1.0, 0.75}, {0.5, 1.05}, {0.05, 0.8}};
    const Polygon hex(ring);
    SplitMix64 rng(20240301);
    for (int i = 0; i < 1000; ++i) {
        const LatLon p{uniform01(rng) * 1.3 - 0.15, uniform01(rng) * 1.3 - 0.15};
        CAPTURE(p.lat);
        CAPTURE(p.lon);
        CHECK(hex.contains(p) == convex_contains(ring, p));
    }
}

TEST_CASE("build_partition: degenerate and invalid inputs") {
    CHECK_THROWS_AS(VoronoiPartition::build({}), DataError);

    const auto one = VoronoiPartition::build({{"only", "Only", {38.9, -77.0}}});
    CHECK(one.size() == 1);
    CHECK(one.assign_cell({0.0, 0.0}) == "only");
    CHECK(one.assign_cell({-45.0, 120.0}) == "only");

    try {
        VoronoiPartition::build(
            {{"a", "", {38.9, -77.0}}, {"b", "", {38.95, -77.1}}, {"c", "", {38.9, -77.0}}});
        FAIL("expected DataError");
    } catch (const DataError& e) {
        const std::string what = e.what();
        CHECK(what.find("a") != std::string::npos);
        CHECK(what.find("c") != std::string::npos);
    }
}

TEST_CASE("assign_cell: exact hit and bisector tie") {
    const auto partition = VoronoiPartition::build(
        {{"k", "", {38.91, -77.02}}, {"m", "", {38.95, -77.08}}, {"n", "", {38.88, -76.99}}});
    CHECK(partition.assign_cell({38.95, -77.08}) == "m");

    // Two stations mirrored in longitude; any point on the meridian between
    // them is exactly equidistant, so the smaller id must win.
    const auto pair =
        VoronoiPartition::build({{"zz", "", {38.9, -77.05}}, {"aa", "", {38.9, -76.95}}});
    CHECK(pair.assign_cell({38.9, -77.0}) == "aa");
    CHECK(pair.assign_cell({38.93, -77.0}) == "aa");
}

TEST_CASE("assign_cell matches an exhaustive nearest-station scan") {
    const auto partition = VoronoiPartition::build(
        {{"s1", "", {38.86, -77.05}}, {"s2", "", {38.93, -77.02}}, {"s3", "", {38.89, -76.96}}});
    SplitMix64 rng(77);
    for (int i = 0; i < 10'000; ++i) {
        const LatLon p{38.82 + uniform01(rng) * 0.16, -77.10 + uniform01(rng) * 0.18};
        // Independent selection: min distance first, then the smallest id
        // among stations achieving it.
        double min_d = std::numeric_limits<double>::infinity();
        for (const Station& s : partition.stations()) {
            min_d = std::min(min_d, haversine_m(p, s.location));
        }
        std::string expected;
        for (const Station& s : partition.stations()) {
            if (haversine_m(p, s.location) == min_d && (expected.empty() || s.id < expected)) {
                expected = s.id;
            }
        }
        REQUIRE(partition.assign_cell(p) == expected);
    }
}

TEST_CASE("assign_zone: first containing zone in file order wins") {
    // Two unit squares sharing the lon=1 edge.
    ZoneSet zones({{"A", Polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}})},
                   {"B", Polygon({{0, 1}, {0, 2}, {1, 2}, {1, 1}})}});
    CHECK(zones.assign({0.5, 0.5}) == "A");
    CHECK(zones.assign({0.5, 1.5}) == "B");
    CHECK_FALSE(zones.assign({5, 5}).has_value());
    CHECK(zones.assign({0.5, 1.0}) == "A"); // shared edge
    CHECK_THROWS_AS(ZoneSet({{"A", Polygon({{0, 0}, {0, 1}, {1, 1}})},
                             {"A", Polygon({{2, 2}, {2, 3}, {3, 3}})}}),
                    ConfigError);
}

TEST_CASE("export_cells: single station covers the whole bbox") {
    const auto partition = VoronoiPartition::build({{"s", "", {38.9, -77.0}}});
    const Bbox box{38.8, -77.1, 39.0, -76.9};
    const auto cells = partition.export_cells(box);
    REQUIRE(cells.size() == 1);
    REQUIRE(cells[0].size() == 4);
    double min_lat = 90, max_lat = -90, min_lon = 180, max_lon = -180;
    for (const LatLon& v : cells[0]) {
        min_lat = std::min(min_lat, v.lat);
        max_lat = std::max(max_lat, v.lat);
        min_lon = std::min(min_lon, v.lon);
        max_lon = std::max(max_lon, v.lon);
    }
    CHECK(min_lat == doctest::Approx(box.min_lat));
    CHECK(max_lat == doctest::Approx(box.max_lat));
    CHECK(min_lon == doctest::Approx(box.min_lon));
    CHECK(max_lon == doctest::Approx(box.max_lon));

    CHECK_THROWS_AS(partition.export_cells(Bbox{38.95, -77.1, 39.0, -76.9}), ConfigError);
}

TEST_CASE("export_cells: two stations split the bbox along the bisector") {
    // Same latitude, so the bisector is the meridian halfway between them.
    const auto partition =
        VoronoiPartition::build({{"w", "", {38.9, -77.06}}, {"e", "", {38.9, -76.94}}});
    const Bbox box{38.8, -77.1, 39.0, -76.9};
    const auto cells = partition.export_cells(box);
    REQUIRE(cells.size() == 2);
    for (const LatLon& v : cells[0]) CHECK(v.lon <= -77.0 + 1e-9); // west cell
    for (const LatLon& v : cells[1]) CHECK(v.lon >= -77.0 - 1e-9); // east cell
    bool west_touches_bisector = false;
    for (const LatLon& v : cells[0]) {
        if (std::abs(v.lon - (-77.0)) < 1e-9) west_touches_bisector = true;
    }
    CHECK(west_touches_bisector);
}

namespace {

std::vector<std::pair<double, double>> project_ring(const std::vector<LatLon>& ring, double lat0,
                                                    double lon0) {
    const double deg = std::numbers::pi / 180.0;
    const double kx = deg * kEarthRadiusM * std::cos(lat0 * deg);
    const double ky = deg * kEarthRadiusM;
    std::vector<std::pair<double, double>> xy;
    xy.reserve(ring.size());
    for (const LatLon& p : ring) xy.emplace_back((p.lon - lon0) * kx, (p.lat - lat0) * ky);
    return xy;
}

} // namespace

TEST_CASE("export_cells: cells tile the bbox (area conservation)") {
    const auto stations = fixture_stations(25, 4242);
    const auto partition = VoronoiPartition::build(stations);
    const Bbox box = fixture_bbox();
    const auto cells = partition.export_cells(box);

    double lat0 = 0, lon0 = 0;
    for (const Station& s : stations) {
        lat0 += s.location.lat;
        lon0 += s.location.lon;
    }
    lat0 /= 25.0;
    lon0 /= 25.0;

    double cell_total = 0;
    for (const auto& ring : cells) {
        REQUIRE(ring.size() >= 3);
        cell_total += polygon_ring_area(project_ring(ring, lat0, lon0));
    }
    const double bbox_area = polygon_ring_area(project_ring({{box.min_lat, box.min_lon},
                                                             {box.min_lat, box.max_lon},
                                                             {box.max_lat, box.max_lon},
                                                             {box.max_lat, box.min_lon}},
                                                            lat0, lon0));
    CHECK(cell_total == doctest::Approx(bbox_area).epsilon(1e-6));
}

TEST_CASE("export_cells agree with nearest-station assignment away from edges") {
    const auto stations = fixture_stations(16, 99);
    const auto partition = VoronoiPartition::build(stations);
    const Bbox box = fixture_bbox();
    const auto cells = partition.export_cells(box);

    double lat0 = 0, lon0 = 0;
    for (const Station& s : stations) {
        lat0 += s.location.lat;
        lon0 += s.location.lon;
    }
    lat0 /= 16.0;
    lon0 /= 16.0;
    const double deg = std::numbers::pi / 180.0;
    const double kx = deg * kEarthRadiusM * std::cos(lat0 * deg);
    const double ky = deg * kEarthRadiusM;

    std::size_t checked = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& ring = cells[i];
        LatLon centroid{0, 0};
        for (const LatLon& v : ring) {
            centroid.lat += v.lat;
            centroid.lon += v.lon;
        }
        centroid.lat /= static_cast<double>(ring.size());
        centroid.lon /= static_cast<double>(ring.size());

        // Sample the centroid plus points partway toward each vertex; skip
        // samples within 1 m of any cell edge.
        std::vector<LatLon> samples = {centroid};
        for (const LatLon& v : ring) {
            samples.push_back({0.5 * (centroid.lat + v.lat), 0.5 * (centroid.lon + v.lon)});
        }
        for (const LatLon& p : samples) {
            double min_edge_dist = std::numeric_limits<double>::infinity();
            const double px = (p.lon - lon0) * kx, py = (p.lat - lat0) * ky;
            for (std::size_t k = 0; k < ring.size(); ++k) {
                const LatLon& a = ring[k];
                const LatLon& b = ring[(k + 1) % ring.size()];
                const double ax = (a.lon - lon0) * kx, ay = (a.lat - lat0) * ky;
                const double bx = (b.lon - lon0) * kx, by = (b.lat - lat0) * ky;
                const double vx = bx - ax, vy = by - ay;
                const double t = std::clamp(
                    ((px - ax) * vx + (py - ay) * vy) / (vx * vx + vy * vy), 0.0, 1.0);
                const double dx = px - (ax + t * vx), dy = py - (ay + t * vy);
                min_edge_dist = std::min(min_edge_dist, std::sqrt(dx * dx + dy * dy));
            }
            if (min_edge_dist < 1.0) continue;
            ++checked;
            REQUIRE(partition.assign_cell(p) == stations[i].id);
        }
    }
    CHECK(checked > 50); // the skip rule must not hollow the test out
}

TEST_CASE("stations csv and geojson round trips") {
    std::stringstream csv;
    write_stations_csv(csv, {{"s1", "First, station", {38.9, -77.0}}, {"s2", "Second", {38.95, -77.05}}},
                       "fixture");
    const auto stations = read_stations_csv(csv);
    REQUIRE(stations.size() == 2);
    CHECK(stations[0].name == "First, station");
    CHECK(stations[1].location.lat == 38.95);

    std::stringstream missing("name,lat\nx,1\n");
    CHECK_THROWS_AS(read_stations_csv(missing), ConfigError);

    const Polygon boundary({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
    std::stringstream geo(boundary_to_geojson(boundary));
    const Polygon parsed = read_boundary_geojson(geo);
    CHECK(parsed.ring().size() == 4);
    CHECK(parsed.contains({0.5, 0.5}));

    ZoneSet zones({{"A", Polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}})}});
    std::stringstream zjson(zones_to_geojson(zones));
    const ZoneSet zparsed = read_zones_geojson(zjson);
    REQUIRE(zparsed.zones().size() == 1);
    CHECK(zparsed.assign({0.5, 0.5}) == "A");

    std::stringstream bad("{\"type\": \"FeatureCollection\", \"features\": []}");
    CHECK_THROWS_AS(read_boundary_geojson(bad), ConfigError);
}

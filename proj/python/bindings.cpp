#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mobility/analytics.hpp"
#include "mobility/error.hpp"
#include "mobility/eval.hpp"
#include "mobility/features.hpp"
#include "mobility/models.hpp"
#include "mobility/rng.hpp"
#include "mobility/sampling.hpp"
#include "mobility/synth.hpp"
#include "mobility/time.hpp"

namespace py = pybind11;
using namespace mobility;

namespace {

LatLon to_latlon(const std::pair<double, double>& p) { return {p.first, p.second}; }

CivilSeconds parse_or_throw(const std::string& text) {
    const auto t = parse_timestamp(text);
    if (!t) throw DataError("unparseable timestamp: " + text);
    return *t;
}

py::dict class_metrics_dict(const ClassMetrics& m) {
    py::dict d;
    d["support"] = m.support;
    d["precision"] = m.precision;
    d["recall"] = m.recall;
    d["f1"] = m.f1;
    d["degenerate"] = m.degenerate;
    return d;
}

py::dict trip_dict(const CleanTrip& t) {
    py::dict d;
    d["start_time"] = format_timestamp(t.start_instant);
    d["duration_s"] = t.duration_s;
    d["start"] = py::make_tuple(t.start_loc.point.lat, t.start_loc.point.lon);
    d["end"] = py::make_tuple(t.end_loc.point.lat, t.end_loc.point.lon);
    d["label"] = t.label ? py::cast(to_string(*t.label)) : py::none();
    d["vehicle_class"] = to_string(t.vehicle_class);
    return d;
}

std::vector<Station> stations_from_tuples(
    const std::vector<std::tuple<std::string, std::string, double, double>>& rows) {
    std::vector<Station> stations;
    stations.reserve(rows.size());
    for (const auto& [id, name, lat, lon] : rows) {
        stations.push_back({id, name, {lat, lon}});
    }
    return stations;
}

// Small end-to-end driver mirroring the CLI flow on generated data; handy for
// smoke-testing the full stack from python.
py::dict run_end_to_end(std::size_t n_per_class, std::size_t station_count, std::uint64_t seed,
                        int tree_count, int max_depth, int min_samples_leaf) {
    const auto partition = VoronoiPartition::build(fixture_stations(station_count, seed));
    const DefaultProfiles profiles = default_profiles(partition);
    std::vector<CleanTrip> trips =
        generate(profiles.commuter, n_per_class, derive_seed(seed, 1), partition);
    const auto casual =
        generate(profiles.recreational, n_per_class, derive_seed(seed, 2), partition);
    trips.insert(trips.end(), casual.begin(), casual.end());

    const FeatureSchema schema = fit_schema(trips, partition);
    LabeledDataset dataset;
    for (const CleanTrip& t : trips) {
        dataset.x.push_back(encode(t, partition, schema));
        dataset.y.push_back(*t.label == UserType::Member ? 1 : 0);
    }
    const SplitResult parts = split(dataset, 0.8, derive_seed(seed, 3));

    const LogisticModel logistic = train_logistic(parts.train, {}, derive_seed(seed, 4));
    ForestHyperparams hp;
    hp.tree_count = tree_count;
    hp.max_depth = max_depth;
    hp.min_samples_leaf = min_samples_leaf;
    const ForestModel forest = train_forest(parts.train, hp, derive_seed(seed, 5));

    const auto evaluate = [&](auto&& predict) {
        std::vector<int> predictions;
        predictions.reserve(parts.test.size());
        for (const FeatureVector& vec : parts.test.x) predictions.push_back(predict(vec));
        return metrics(confusion(predictions, parts.test.y));
    };
    const MetricsReport lr = evaluate(
        [&](const FeatureVector& v) { return predict_logistic(logistic, v) >= 0.5 ? 1 : 0; });
    const MetricsReport rf = evaluate(
        [&](const FeatureVector& v) { return predict_forest(forest, v) >= 0.5 ? 1 : 0; });

    py::dict result;
    result["test_size"] = parts.test.size();
    result["logistic_f1"] = lr.average.f1;
    result["forest_f1"] = rf.average.f1;
    result["schema_size"] = schema.size();
    result["duration_weight"] = logistic.weights[schema.duration_index()];
    return result;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Shared-mobility trip analysis: Voronoi features, member/casual classifiers, "
              "evaluation metrics and the synthetic trip generator.";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<DataError>(m, "DataError");

    py::class_<VoronoiPartition>(m, "VoronoiPartition")
        .def("__len__", &VoronoiPartition::size)
        .def("assign_cell",
             [](const VoronoiPartition& p, std::pair<double, double> point) {
                 return p.assign_cell(to_latlon(point));
             },
             py::arg("point"), "Id of the nearest station (ties to the smallest id)")
        .def("cell_index",
             [](const VoronoiPartition& p, std::pair<double, double> point) {
                 return p.cell_index(to_latlon(point));
             },
             py::arg("point"))
        .def_property_readonly("station_ids", [](const VoronoiPartition& p) {
            std::vector<std::string> ids;
            ids.reserve(p.size());
            for (const Station& s : p.stations()) ids.push_back(s.id);
            return ids;
        });

    py::class_<FeatureSchema>(m, "FeatureSchema")
        .def("__len__", &FeatureSchema::size)
        .def_property_readonly("feature_names",
                               [](const FeatureSchema& s) { return s.names; })
        .def_readonly("duration_min_s", &FeatureSchema::duration_min_s)
        .def_readonly("duration_max_s", &FeatureSchema::duration_max_s);

    py::class_<CohortProfile>(m, "CohortProfile")
        .def_readonly("name", &CohortProfile::name)
        .def_property_readonly("median_duration_min",
                               [](const CohortProfile& p) { return p.duration_median_min; });

    m.def("haversine_m",
          [](std::pair<double, double> a, std::pair<double, double> b) {
              return haversine_m(to_latlon(a), to_latlon(b));
          },
          py::arg("a"), py::arg("b"), "Great-circle distance in meters between (lat, lon) pairs");

    m.def("polygon_contains",
          [](const std::vector<std::pair<double, double>>& ring,
             std::pair<double, double> point) {
              std::vector<LatLon> vertices;
              vertices.reserve(ring.size());
              for (const auto& p : ring) vertices.push_back(to_latlon(p));
              return Polygon(std::move(vertices)).contains(to_latlon(point));
          },
          py::arg("ring"), py::arg("point"),
          "Ray-casting containment; boundary points count as inside");

    m.def("fixture_stations",
          [](std::size_t count, std::uint64_t seed) {
              std::vector<std::tuple<std::string, std::string, double, double>> rows;
              for (const Station& s : fixture_stations(count, seed)) {
                  rows.emplace_back(s.id, s.name, s.location.lat, s.location.lon);
              }
              return rows;
          },
          py::arg("count"), py::arg("seed") = 1,
          "Deterministic jittered station grid as (id, name, lat, lon) rows");

    m.def("build_partition",
          [](const std::vector<std::tuple<std::string, std::string, double, double>>& rows) {
              return VoronoiPartition::build(stations_from_tuples(rows));
          },
          py::arg("stations"));

    m.def("time_bin",
          [](const std::string& timestamp) { return time_bin(parse_or_throw(timestamp)); },
          py::arg("timestamp"), "Half-hour start-time bin in [0, 47]");

    m.def("metrics_from_counts",
          [](std::int64_t casual_casual, std::int64_t casual_member, std::int64_t member_casual,
             std::int64_t member_member) {
              ConfusionMatrix cm;
              cm.counts = {{{casual_casual, casual_member}, {member_casual, member_member}}};
              const MetricsReport report = metrics(cm);
              py::dict d;
              d["casual"] = class_metrics_dict(report.casual);
              d["member"] = class_metrics_dict(report.member);
              d["average"] = class_metrics_dict(report.average);
              return d;
          },
          py::arg("casual_casual"), py::arg("casual_member"), py::arg("member_casual"),
          py::arg("member_member"),
          "Precision/recall/F1 per class from confusion counts (rows = actual)");

    m.def("default_profiles",
          [](const VoronoiPartition& partition) {
              const DefaultProfiles p = default_profiles(partition);
              py::dict d;
              d["commuter"] = p.commuter;
              d["recreational"] = p.recreational;
              d["dockless_bike"] = p.dockless_bike;
              d["scooter"] = p.scooter;
              return d;
          },
          py::arg("partition"));

    m.def("generate_trips",
          [](const CohortProfile& profile, std::size_t n, std::uint64_t seed,
             const VoronoiPartition& partition) {
              py::list out;
              for (const CleanTrip& t : generate(profile, n, seed, partition)) {
                  out.append(trip_dict(t));
              }
              return out;
          },
          py::arg("profile"), py::arg("n"), py::arg("seed"), py::arg("partition"));

    m.def("percentile", &percentile, py::arg("values"), py::arg("q"),
          "Linear interpolation between closest ranks, h = (n-1)*q");

    m.def("run_end_to_end", &run_end_to_end, py::arg("n_per_class"),
          py::arg("station_count") = 64, py::arg("seed") = 1, py::arg("tree_count") = 50,
          py::arg("max_depth") = 12, py::arg("min_samples_leaf") = 5,
          "Generate balanced synthetic cohorts, train both models, report test F1");
}

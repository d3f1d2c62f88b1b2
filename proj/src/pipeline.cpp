#include "mobility/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "mobility/analytics.hpp"
#include "mobility/csv.hpp"
#include "mobility/error.hpp"
#include "mobility/eval.hpp"
#include "mobility/features.hpp"
#include "mobility/geo.hpp"
#include "mobility/rng.hpp"
#include "mobility/synth.hpp"

namespace mobility {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::ifstream open_input(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(std::string(what) + " file not found: " + path);
    }
    return in;
}

void write_text_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write output file: " + path.string());
    out << content;
}

template <typename T>
void maybe_set(const json& j, const char* key, T& target) {
    if (j.contains(key)) target = j.at(key).get<T>();
}

json seeds_json(const RunConfig& c) {
    return {{"downsample", c.seed_downsample}, {"split", c.seed_split},
            {"logistic", c.seed_logistic},     {"forest", c.seed_forest},
            {"synth", c.seed_synth},           {"grid", c.seed_grid}};
}

json provenance(const RunConfig& c) {
    return {{"config_hash", c.config_hash()}, {"seeds", seeds_json(c)}};
}

std::string csv_comment(const RunConfig& c) {
    std::ostringstream out;
    out << "config_hash=" << c.config_hash() << " seeds=downsample:" << c.seed_downsample
        << ",split:" << c.seed_split << ",logistic:" << c.seed_logistic
        << ",forest:" << c.seed_forest << ",synth:" << c.seed_synth << ",grid:" << c.seed_grid;
    return out.str();
}

// Injects the provenance block into a JSON document produced by the library
// layer, which knows nothing about run configs.
std::string with_provenance(const std::string& json_text, const RunConfig& c) {
    json doc = json::parse(json_text);
    doc["provenance"] = provenance(c);
    return doc.dump(2) + "\n";
}

std::string with_comment(const std::string& text, const RunConfig& c) {
    return "# " + csv_comment(c) + "\n" + text;
}

json columns_to_json(const DockedColumns& c) {
    return {{"start_time", c.start_time},
            {"end_time", c.end_time},
            {"start_station_id", c.start_station_id},
            {"end_station_id", c.end_station_id},
            {"user_type", c.user_type},
            {"vehicle_id", c.vehicle_id},
            {"member_values", c.member_values},
            {"casual_values", c.casual_values}};
}

json columns_to_json(const DocklessColumns& c) {
    return {{"start_time", c.start_time},
            {"end_time", c.end_time},
            {"start_lat", c.start_lat},
            {"start_lon", c.start_lon},
            {"end_lat", c.end_lat},
            {"end_lon", c.end_lon},
            {"operator", c.operator_name},
            {"vehicle_class", c.vehicle_class},
            {"cancelled", c.cancelled},
            {"default_class", c.default_class == RawVehicleClass::Scooter ? "scooter" : "bike"},
            {"bike_values", c.bike_values},
            {"scooter_values", c.scooter_values},
            {"cancelled_true_values", c.cancelled_true_values}};
}

void columns_from_json(const json& j, DockedColumns& c) {
    maybe_set(j, "start_time", c.start_time);
    maybe_set(j, "end_time", c.end_time);
    maybe_set(j, "start_station_id", c.start_station_id);
    maybe_set(j, "end_station_id", c.end_station_id);
    maybe_set(j, "user_type", c.user_type);
    maybe_set(j, "vehicle_id", c.vehicle_id);
    maybe_set(j, "member_values", c.member_values);
    maybe_set(j, "casual_values", c.casual_values);
}

void columns_from_json(const json& j, DocklessColumns& c) {
    maybe_set(j, "start_time", c.start_time);
    maybe_set(j, "end_time", c.end_time);
    maybe_set(j, "start_lat", c.start_lat);
    maybe_set(j, "start_lon", c.start_lon);
    maybe_set(j, "end_lat", c.end_lat);
    maybe_set(j, "end_lon", c.end_lon);
    maybe_set(j, "operator", c.operator_name);
    maybe_set(j, "vehicle_class", c.vehicle_class);
    maybe_set(j, "cancelled", c.cancelled);
    maybe_set(j, "bike_values", c.bike_values);
    maybe_set(j, "scooter_values", c.scooter_values);
    maybe_set(j, "cancelled_true_values", c.cancelled_true_values);
    if (j.contains("default_class")) {
        const std::string v = j.at("default_class").get<std::string>();
        if (v == "bike") c.default_class = RawVehicleClass::Bike;
        else if (v == "scooter") c.default_class = RawVehicleClass::Scooter;
        else throw ConfigError("columns.dockless.default_class must be bike or scooter");
    }
}

} // namespace

RunConfig RunConfig::from_json_file(const std::string& path) {
    std::ifstream in = open_input(path, "config");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("invalid config JSON " + path + ": " + e.what());
    }
    RunConfig c;
    try {
        if (doc.contains("inputs")) {
            const json& inputs = doc.at("inputs");
            maybe_set(inputs, "docked", c.docked_path);
            maybe_set(inputs, "dockless", c.dockless_path);
            maybe_set(inputs, "stations", c.stations_path);
            maybe_set(inputs, "boundary", c.boundary_path);
            maybe_set(inputs, "zones", c.zones_path);
            maybe_set(inputs, "cleaned", c.cleaned_path);
        }
        if (doc.contains("columns")) {
            if (doc.at("columns").contains("docked")) {
                columns_from_json(doc.at("columns").at("docked"), c.docked_columns);
            }
            if (doc.at("columns").contains("dockless")) {
                columns_from_json(doc.at("columns").at("dockless"), c.dockless_columns);
            }
        }
        if (doc.contains("cleaning")) {
            maybe_set(doc.at("cleaning"), "loc_equality_radius_m",
                      c.cleaning.loc_equality_radius_m);
        }
        if (doc.contains("sampling")) {
            maybe_set(doc.at("sampling"), "train_fraction", c.train_fraction);
            maybe_set(doc.at("sampling"), "similarity_tolerance", c.similarity_tolerance);
        }
        if (doc.contains("logistic")) {
            const json& l = doc.at("logistic");
            maybe_set(l, "learning_rate", c.logistic.learning_rate);
            maybe_set(l, "l2", c.logistic.l2);
            maybe_set(l, "max_epochs", c.logistic.max_epochs);
            maybe_set(l, "tolerance", c.logistic.tolerance);
        }
        if (doc.contains("forest")) {
            const json& f = doc.at("forest");
            maybe_set(f, "tree_count", c.forest.tree_count);
            maybe_set(f, "max_depth", c.forest.max_depth);
            maybe_set(f, "min_samples_leaf", c.forest.min_samples_leaf);
            maybe_set(f, "max_features", c.forest.max_features);
            maybe_set(f, "threads", c.forest.threads);
        }
        maybe_set(doc, "grid_search", c.grid_search_enabled);
        if (doc.contains("synth")) {
            const json& s = doc.at("synth");
            maybe_set(s, "stations", c.synth_stations);
            maybe_set(s, "trips_per_cohort", c.synth_trips_per_cohort);
            maybe_set(s, "zone_rows", c.synth_zone_rows);
            maybe_set(s, "zone_cols", c.synth_zone_cols);
            maybe_set(s, "profiles", c.profiles_path);
        }
        if (doc.contains("analyze")) {
            const json& a = doc.at("analyze");
            if (a.contains("morning_window")) {
                const auto window = a.at("morning_window").get<std::vector<int>>();
                if (window.size() != 2) {
                    throw ConfigError("analyze.morning_window must be [begin_minute, end_minute]");
                }
                c.morning_window_begin_minute = window[0];
                c.morning_window_end_minute = window[1];
            }
        }
        if (doc.contains("seeds")) {
            const json& s = doc.at("seeds");
            maybe_set(s, "downsample", c.seed_downsample);
            maybe_set(s, "split", c.seed_split);
            maybe_set(s, "logistic", c.seed_logistic);
            maybe_set(s, "forest", c.seed_forest);
            maybe_set(s, "synth", c.seed_synth);
            maybe_set(s, "grid", c.seed_grid);
        }
        maybe_set(doc, "output_dir", c.output_dir);
    } catch (const json::exception& e) {
        throw ConfigError("invalid config value in " + path + ": " + e.what());
    }
    return c;
}

std::string RunConfig::to_canonical_json() const {
    json doc;
    doc["inputs"] = {{"docked", docked_path},     {"dockless", dockless_path},
                     {"stations", stations_path}, {"boundary", boundary_path},
                     {"zones", zones_path},       {"cleaned", cleaned_path}};
    doc["columns"] = {{"docked", columns_to_json(docked_columns)},
                      {"dockless", columns_to_json(dockless_columns)}};
    doc["cleaning"] = {{"loc_equality_radius_m", cleaning.loc_equality_radius_m}};
    doc["sampling"] = {{"train_fraction", train_fraction},
                       {"similarity_tolerance", similarity_tolerance}};
    doc["logistic"] = {{"learning_rate", logistic.learning_rate},
                       {"l2", logistic.l2},
                       {"max_epochs", logistic.max_epochs},
                       {"tolerance", logistic.tolerance}};
    // threads is omitted like output_dir: execution details leave results
    // untouched (per-tree seeding), so they do not belong in the fingerprint.
    doc["forest"] = {{"tree_count", forest.tree_count},
                     {"max_depth", forest.max_depth},
                     {"min_samples_leaf", forest.min_samples_leaf},
                     {"max_features", forest.max_features}};
    doc["grid_search"] = grid_search_enabled;
    doc["synth"] = {{"stations", synth_stations},
                    {"trips_per_cohort", synth_trips_per_cohort},
                    {"zone_rows", synth_zone_rows},
                    {"zone_cols", synth_zone_cols},
                    {"profiles", profiles_path}};
    doc["analyze"] = {
        {"morning_window", {morning_window_begin_minute, morning_window_end_minute}}};
    doc["seeds"] = seeds_json(*this);
    // output_dir is deliberately not hashed: where results land does not
    // change what they are.
    return doc.dump(2);
}

std::string RunConfig::config_hash() const { return fnv1a_hex(to_canonical_json()); }

std::string RunConfig::effective_cleaned_path() const {
    if (!cleaned_path.empty()) return cleaned_path;
    return (fs::path(output_dir) / "cleaned_trips.csv").string();
}

namespace {

std::vector<Station> load_stations(const RunConfig& config) {
    if (config.stations_path.empty()) {
        throw ConfigError("this command needs inputs.stations");
    }
    std::ifstream in = open_input(config.stations_path, "stations");
    return read_stations_csv(in);
}

Polygon load_boundary(const RunConfig& config) {
    if (config.boundary_path.empty()) {
        throw ConfigError("this command needs inputs.boundary");
    }
    std::ifstream in = open_input(config.boundary_path, "boundary");
    return read_boundary_geojson(in);
}

std::vector<CleanTrip> load_cleaned(const RunConfig& config) {
    std::ifstream in = open_input(config.effective_cleaned_path(), "cleaned trips");
    return read_clean_trips_csv(in);
}

json row_errors_json(const std::vector<RowError>& errors) {
    json arr = json::array();
    for (const RowError& e : errors) {
        arr.push_back({{"line", e.line}, {"message", e.message}});
    }
    return arr;
}

json report_json(const CleaningReport& report) {
    json removed;
    for (std::size_t i = 0; i < kCleaningRuleCount; ++i) {
        removed[kCleaningRuleNames[i]] = report.removed_by_rule[i];
    }
    return {{"input_count", report.input_count},
            {"kept_count", report.kept_count},
            {"removed_by_rule", removed}};
}

struct Cohorts {
    std::vector<CleanTrip> cabi_member, cabi_casual, dockless_bike, scooter;
};

Cohorts split_cohorts(const std::vector<CleanTrip>& trips) {
    Cohorts c;
    for (const CleanTrip& t : trips) {
        switch (t.vehicle_class) {
            case VehicleClass::DockedBike:
                (t.label == UserType::Member ? c.cabi_member : c.cabi_casual).push_back(t);
                break;
            case VehicleClass::DocklessBike: c.dockless_bike.push_back(t); break;
            case VehicleClass::Scooter: c.scooter.push_back(t); break;
        }
    }
    return c;
}

// The labelled portion, encoded; this is the models' training corpus.
struct EncodedLabeled {
    VoronoiPartition partition;
    FeatureSchema schema;
    LabeledDataset dataset;
};

EncodedLabeled encode_labeled(const RunConfig& config, const std::vector<CleanTrip>& trips) {
    EncodedLabeled out{VoronoiPartition::build(load_stations(config)), {}, {}};
    std::vector<CleanTrip> labeled;
    for (const CleanTrip& t : trips) {
        if (t.label) labeled.push_back(t);
    }
    if (labeled.empty()) throw DataError("no labelled trips in the cleaned data");
    out.schema = fit_schema(labeled, out.partition);
    out.dataset.x.reserve(labeled.size());
    out.dataset.y.reserve(labeled.size());
    for (const CleanTrip& t : labeled) {
        out.dataset.x.push_back(encode(t, out.partition, out.schema));
        out.dataset.y.push_back(*t.label == UserType::Member ? 1 : 0);
    }
    return out;
}

Classifier load_model(const RunConfig& config, const char* filename, FeatureSchema* schema_out) {
    const fs::path path = fs::path(config.output_dir) / filename;
    std::ifstream in = open_input(path.string(), "model");
    std::stringstream buffer;
    buffer << in.rdbuf();
    auto [model, schema] = model_from_json(buffer.str());
    if (schema_out) *schema_out = std::move(schema);
    return model;
}

void check_schema_matches_partition(const FeatureSchema& schema,
                                    const VoronoiPartition& partition) {
    if (schema.cell_count() != partition.size()) {
        throw ConfigError("model schema cell count does not match the stations file");
    }
    for (std::size_t i = 0; i < partition.size(); ++i) {
        if (schema.cell_ids[i] != partition.stations()[i].id) {
            throw ConfigError("model schema cells do not match the stations file (cell " +
                              std::to_string(i) + ")");
        }
    }
}

} // namespace

void run_clean(const RunConfig& config) {
    if (config.docked_path.empty() && config.dockless_path.empty()) {
        throw ConfigError("clean needs inputs.docked and/or inputs.dockless");
    }
    const Polygon boundary = load_boundary(config);

    std::vector<CleanTrip> all;
    json report = {{"format_version", 1}, {"provenance", provenance(config)}};
    CleaningReport total;

    if (!config.docked_path.empty()) {
        std::ifstream in = open_input(config.docked_path, "docked trips");
        ParseResult<RawDockedTrip> parsed;
        try {
            parsed = parse_docked(in, config.docked_columns);
        } catch (const ConfigError& e) {
            throw ConfigError(config.docked_path + ": " + e.what());
        }
        const StationIndex index = make_station_index(load_stations(config));
        const CleanResult result = clean(parsed.records, index, boundary, config.cleaning);
        report["docked"] = {{"file", config.docked_path},
                            {"parse_errors", row_errors_json(parsed.errors)},
                            {"report", report_json(result.report)}};
        total.input_count += result.report.input_count;
        total.kept_count += result.report.kept_count;
        for (std::size_t i = 0; i < kCleaningRuleCount; ++i) {
            total.removed_by_rule[i] += result.report.removed_by_rule[i];
        }
        all.insert(all.end(), result.trips.begin(), result.trips.end());
    }
    if (!config.dockless_path.empty()) {
        std::ifstream in = open_input(config.dockless_path, "dockless trips");
        ParseResult<RawDocklessTrip> parsed;
        try {
            parsed = parse_dockless(in, config.dockless_columns);
        } catch (const ConfigError& e) {
            throw ConfigError(config.dockless_path + ": " + e.what());
        }
        const CleanResult result = clean(parsed.records, boundary, config.cleaning);
        report["dockless"] = {{"file", config.dockless_path},
                              {"parse_errors", row_errors_json(parsed.errors)},
                              {"report", report_json(result.report)}};
        total.input_count += result.report.input_count;
        total.kept_count += result.report.kept_count;
        for (std::size_t i = 0; i < kCleaningRuleCount; ++i) {
            total.removed_by_rule[i] += result.report.removed_by_rule[i];
        }
        all.insert(all.end(), result.trips.begin(), result.trips.end());
    }
    report["total"] = report_json(total);

    std::ostringstream trips_csv;
    write_clean_trips_csv(trips_csv, all, csv_comment(config));
    write_text_file(fs::path(config.output_dir) / "cleaned_trips.csv", trips_csv.str());
    write_text_file(fs::path(config.output_dir) / "cleaning_report.json", report.dump(2) + "\n");
}

void run_partition(const RunConfig& config) {
    const auto partition = VoronoiPartition::build(load_stations(config));
    Bbox box{90, 180, -90, -180};
    for (const Station& s : partition.stations()) {
        box.min_lat = std::min(box.min_lat, s.location.lat);
        box.max_lat = std::max(box.max_lat, s.location.lat);
        box.min_lon = std::min(box.min_lon, s.location.lon);
        box.max_lon = std::max(box.max_lon, s.location.lon);
    }
    const double pad_lat = std::max(0.01, (box.max_lat - box.min_lat) * 0.05);
    const double pad_lon = std::max(0.01, (box.max_lon - box.min_lon) * 0.05);
    box.min_lat -= pad_lat;
    box.max_lat += pad_lat;
    box.min_lon -= pad_lon;
    box.max_lon += pad_lon;
    write_text_file(fs::path(config.output_dir) / "cells.geojson",
                    with_provenance(cells_to_geojson(partition, box), config));
}

void run_train(const RunConfig& config) {
    const EncodedLabeled enc = encode_labeled(config, load_cleaned(config));
    const LabeledDataset balanced = downsample(enc.dataset, config.seed_downsample);
    const SimilarityReport similarity =
        distribution_check(balanced, enc.dataset, enc.schema, config.similarity_tolerance);
    const SplitResult parts = split(balanced, config.train_fraction, config.seed_split);

    ForestHyperparams forest_params = config.forest;
    json grid_log;
    if (config.grid_search_enabled) {
        std::vector<ForestHyperparams> grid = default_forest_grid();
        for (ForestHyperparams& hp : grid) hp.threads = config.forest.threads;
        const GridSearchResult result = grid_search(parts.train, grid, config.seed_grid);
        forest_params = result.best;
        json entries = json::array();
        for (const GridSearchEntry& e : result.entries) {
            entries.push_back({{"tree_count", e.params.tree_count},
                               {"max_depth", e.params.max_depth},
                               {"min_samples_leaf", e.params.min_samples_leaf},
                               {"validation_macro_f1", e.validation_macro_f1}});
        }
        grid_log = {{"format_version", 1},
                    {"provenance", provenance(config)},
                    {"entries", entries},
                    {"best_index", result.best_index}};
    }

    const LogisticModel logistic = train_logistic(parts.train, config.logistic,
                                                  config.seed_logistic);
    const ForestModel forest = train_forest(parts.train, forest_params, config.seed_forest);

    const fs::path out(config.output_dir);
    write_text_file(out / "schema.json", with_provenance(enc.schema.to_json(), config));
    write_text_file(out / "model_logistic.json",
                    with_provenance(model_to_json(Classifier(logistic), enc.schema), config));
    write_text_file(out / "model_forest.json",
                    with_provenance(model_to_json(Classifier(forest), enc.schema), config));
    write_text_file(out / "downsample_report.json",
                    with_provenance(similarity.to_json(), config));
    if (config.grid_search_enabled) {
        write_text_file(out / "grid_search.json", grid_log.dump(2) + "\n");
    }

    const json summary = {{"format_version", 1},
                          {"provenance", provenance(config)},
                          {"labelled_trips", enc.dataset.size()},
                          {"class_counts",
                           {{"member", enc.dataset.count(1)}, {"casual", enc.dataset.count(0)}}},
                          {"balanced_size", balanced.size()},
                          {"train_size", parts.train.size()},
                          {"test_size", parts.test.size()},
                          {"similarity_flagged", similarity.any_flagged},
                          {"forest_params",
                           {{"tree_count", forest_params.tree_count},
                            {"max_depth", forest_params.max_depth},
                            {"min_samples_leaf", forest_params.min_samples_leaf}}},
                          {"logistic", {{"epochs", logistic.epochs},
                                        {"final_loss", logistic.final_loss}}}};
    write_text_file(out / "train_summary.json", summary.dump(2) + "\n");
}

namespace {

json confusion_json(const ConfusionMatrix& cm) {
    return {{"actual_casual", {{"predicted_casual", cm.counts[0][0]},
                               {"predicted_member", cm.counts[0][1]}}},
            {"actual_member", {{"predicted_casual", cm.counts[1][0]},
                               {"predicted_member", cm.counts[1][1]}}}};
}

ConfusionMatrix confusion_from_fixture(const json& counts) {
    ConfusionMatrix cm;
    cm.counts[0][0] = counts.at("actual_casual").at("predicted_casual").get<std::int64_t>();
    cm.counts[0][1] = counts.at("actual_casual").at("predicted_member").get<std::int64_t>();
    cm.counts[1][0] = counts.at("actual_member").at("predicted_casual").get<std::int64_t>();
    cm.counts[1][1] = counts.at("actual_member").at("predicted_member").get<std::int64_t>();
    return cm;
}

} // namespace

void run_evaluate(const RunConfig& config) {
    const fs::path out(config.output_dir);

    if (!config.cm_fixture_path.empty()) {
        std::ifstream in = open_input(config.cm_fixture_path, "confusion fixture");
        json doc;
        try {
            in >> doc;
        } catch (const json::exception& e) {
            throw ConfigError(std::string("invalid confusion fixture JSON: ") + e.what());
        }
        ConfusionMatrix cm;
        std::string title = "fixture";
        try {
            cm = confusion_from_fixture(doc.at("counts"));
            if (doc.contains("model")) title = doc.at("model").get<std::string>();
        } catch (const json::exception& e) {
            throw ConfigError(std::string("confusion fixture: ") + e.what());
        }
        const MetricsReport report = metrics(cm);
        const json result = {{"format_version", 1},
                             {"provenance", provenance(config)},
                             {"model", title},
                             {"confusion", confusion_json(cm)},
                             {"metrics", json::parse(report.to_json())}};
        write_text_file(out / "evaluation.json", result.dump(2) + "\n");
        write_text_file(out / "evaluation.txt",
                        with_comment(format_confusion_table(cm, title) + "\n" +
                                         format_metrics_table(report, title),
                                     config));
        return;
    }

    const EncodedLabeled enc = encode_labeled(config, load_cleaned(config));
    // Same seeds as `train`, so this re-derives the identical held-out split.
    const LabeledDataset balanced = downsample(enc.dataset, config.seed_downsample);
    const SplitResult parts = split(balanced, config.train_fraction, config.seed_split);

    json result = {{"format_version", 1}, {"provenance", provenance(config)}};
    std::string text;
    const std::pair<const char*, const char*> models[] = {
        {"model_logistic.json", "logistic_regression"},
        {"model_forest.json", "random_forest"},
    };
    for (const auto& [file, name] : models) {
        FeatureSchema schema;
        const Classifier model = load_model(config, file, &schema);
        check_schema_matches_partition(schema, enc.partition);
        std::vector<int> predictions;
        predictions.reserve(parts.test.size());
        for (const FeatureVector& vec : parts.test.x) {
            predictions.push_back(predict_member(model, vec) ? 1 : 0);
        }
        const ConfusionMatrix cm = confusion(predictions, parts.test.y);
        const MetricsReport report = metrics(cm);
        result[name] = {{"confusion", confusion_json(cm)},
                        {"metrics", json::parse(report.to_json())}};
        text += format_confusion_table(cm, name) + "\n" + format_metrics_table(report, name) +
                "\n";

        // Strongest positive/negative coefficients for linear-model inspection.
        if (std::holds_alternative<LogisticModel>(model)) {
            const CoefficientRanking ranking =
                top_coefficients(std::get<LogisticModel>(model), schema, 10);
            json positive = json::array(), negative = json::array();
            for (const auto& [feature, weight] : ranking.top_positive) {
                positive.push_back({{"feature", feature}, {"weight", weight}});
            }
            for (const auto& [feature, weight] : ranking.top_negative) {
                negative.push_back({{"feature", feature}, {"weight", weight}});
            }
            result[name]["top_coefficients"] = {{"positive", positive}, {"negative", negative}};
        }
    }
    // Forest feature importances, strongest first.
    FeatureSchema forest_schema;
    const Classifier forest = load_model(config, "model_forest.json", &forest_schema);
    const std::vector<double> importance =
        feature_importance(std::get<ForestModel>(forest));
    std::vector<std::size_t> order(importance.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return importance[a] > importance[b]; });
    json top_importance = json::array();
    for (std::size_t i = 0; i < std::min<std::size_t>(order.size(), 20); ++i) {
        top_importance.push_back({{"feature", forest_schema.names[order[i]]},
                                  {"importance", importance[order[i]]}});
    }
    result["random_forest"]["top_importances"] = top_importance;

    write_text_file(out / "evaluation.json", result.dump(2) + "\n");
    write_text_file(out / "evaluation.txt", with_comment(text, config));
}

void run_classify(const RunConfig& config) {
    const std::vector<CleanTrip> trips = load_cleaned(config);
    const Cohorts cohorts = split_cohorts(trips);
    if (cohorts.dockless_bike.empty() && cohorts.scooter.empty()) {
        throw DataError("classify: the cleaned data has no dockless trips");
    }
    const auto partition = VoronoiPartition::build(load_stations(config));

    json result = {{"format_version", 1}, {"provenance", provenance(config)}};
    std::string text;
    const std::pair<const char*, const char*> models[] = {
        {"model_logistic.json", "logistic_regression"},
        {"model_forest.json", "random_forest"},
    };
    for (const auto& [file, name] : models) {
        FeatureSchema schema;
        const Classifier model = load_model(config, file, &schema);
        check_schema_matches_partition(schema, partition);
        std::vector<CohortShareReport> reports;
        if (!cohorts.dockless_bike.empty()) {
            reports.push_back(
                classify_cohort(model, cohorts.dockless_bike, partition, schema, "dockless_bike"));
        }
        if (!cohorts.scooter.empty()) {
            reports.push_back(
                classify_cohort(model, cohorts.scooter, partition, schema, "scooter"));
        }
        json cohort_json = json::array();
        for (const CohortShareReport& r : reports) {
            cohort_json.push_back(json::parse(r.to_json()));
        }
        result[name] = cohort_json;
        text += format_cohort_table(reports, name) + "\n";
    }
    write_text_file(fs::path(config.output_dir) / "cohort_shares.json", result.dump(2) + "\n");
    write_text_file(fs::path(config.output_dir) / "cohort_shares.txt",
                    with_comment(text, config));
}

void run_analyze(const RunConfig& config) {
    const std::vector<CleanTrip> trips = load_cleaned(config);
    const Cohorts cohorts = split_cohorts(trips);
    std::vector<CohortTrips> present;
    if (!cohorts.cabi_member.empty()) present.push_back({"cabi_member", cohorts.cabi_member});
    if (!cohorts.cabi_casual.empty()) present.push_back({"cabi_casual", cohorts.cabi_casual});
    if (!cohorts.dockless_bike.empty()) {
        present.push_back({"dockless_bike", cohorts.dockless_bike});
    }
    if (!cohorts.scooter.empty()) present.push_back({"scooter", cohorts.scooter});
    if (present.empty()) throw DataError("analyze: no trips");

    const fs::path out(config.output_dir);
    const char* day_names[7] = {"mon", "tue", "wed", "thu", "fri", "sat", "sun"};

    // Day-of-week shares per cohort.
    {
        const auto series = day_of_week_distribution(present);
        json rows = json::array();
        std::ostringstream csv;
        csv << "# " << csv_comment(config) << "\ncohort,day,share\n";
        for (const auto& [cohort, shares] : series) {
            for (int d = 0; d < 7; ++d) {
                rows.push_back({{"cohort", cohort}, {"day", day_names[d]}, {"share", shares[d]}});
                csv << cohort << ',' << day_names[d] << ',' << format_double(shares[d]) << '\n';
            }
        }
        const json doc = {{"format_version", 1},
                          {"provenance", provenance(config)},
                          {"series", rows}};
        write_text_file(out / "day_of_week.json", doc.dump(2) + "\n");
        write_text_file(out / "day_of_week.csv", csv.str());
    }

    // Hourly weekday/weekend series per cohort.
    {
        json rows = json::array();
        std::ostringstream csv;
        csv << "# " << csv_comment(config) << "\ncohort,series,hour,share\n";
        for (const CohortTrips& cohort : present) {
            const HourlyDistribution dist = hourly_distribution(cohort.trips);
            for (int h = 0; h < 24; ++h) {
                if (!dist.weekday_empty) {
                    rows.push_back({{"cohort", cohort.name},
                                    {"series", "weekday"},
                                    {"hour", h},
                                    {"share", dist.weekday[h]}});
                    csv << cohort.name << ",weekday," << h << ','
                        << format_double(dist.weekday[h]) << '\n';
                }
                if (!dist.weekend_empty) {
                    rows.push_back({{"cohort", cohort.name},
                                    {"series", "weekend"},
                                    {"hour", h},
                                    {"share", dist.weekend[h]}});
                    csv << cohort.name << ",weekend," << h << ','
                        << format_double(dist.weekend[h]) << '\n';
                }
            }
        }
        const json doc = {{"format_version", 1},
                          {"provenance", provenance(config)},
                          {"series", rows}};
        write_text_file(out / "hourly.json", doc.dump(2) + "\n");
        write_text_file(out / "hourly.csv", csv.str());
    }

    // Duration percentile bands per cohort.
    {
        json rows = json::array();
        std::ostringstream csv;
        csv << "# " << csv_comment(config) << "\ncohort,hour,p25_s,p50_s,p75_s\n";
        for (const CohortTrips& cohort : present) {
            for (const DurationBand& band : duration_percentile_bands(cohort.trips)) {
                rows.push_back({{"cohort", cohort.name},
                                {"hour", band.hour},
                                {"p25_s", band.p25},
                                {"p50_s", band.p50},
                                {"p75_s", band.p75}});
                csv << cohort.name << ',' << band.hour << ',' << format_double(band.p25) << ','
                    << format_double(band.p50) << ',' << format_double(band.p75) << '\n';
            }
        }
        const json doc = {{"format_version", 1},
                          {"provenance", provenance(config)},
                          {"series", rows}};
        write_text_file(out / "duration_bands.json", doc.dump(2) + "\n");
        write_text_file(out / "duration_bands.csv", csv.str());
    }

    // Morning-peak zone shares per cohort (needs a zone file).
    if (!config.zones_path.empty()) {
        std::ifstream in = open_input(config.zones_path, "zones");
        const ZoneSet zones = read_zones_geojson(in);
        const MinuteWindow window{config.morning_window_begin_minute,
                                  config.morning_window_end_minute};
        json rows = json::array();
        std::ostringstream csv;
        csv << "# " << csv_comment(config) << "\ncohort,zone,percent\n";
        for (const CohortTrips& cohort : present) {
            const ZoneShares shares = zone_start_shares(cohort.trips, zones, window);
            if (shares.empty_window) {
                rows.push_back({{"cohort", cohort.name}, {"empty_window", true}});
                continue;
            }
            for (const auto& [zone, pct] : shares.percent_by_zone) {
                rows.push_back({{"cohort", cohort.name}, {"zone", zone}, {"percent", pct}});
                csv << cohort.name << ',' << zone << ',' << format_double(pct) << '\n';
            }
            rows.push_back({{"cohort", cohort.name},
                            {"zone", "unassigned"},
                            {"percent", shares.unassigned_percent}});
            csv << cohort.name << ",unassigned," << format_double(shares.unassigned_percent)
                << '\n';
        }
        const json doc = {{"format_version", 1},
                          {"provenance", provenance(config)},
                          {"window_minutes",
                           {config.morning_window_begin_minute, config.morning_window_end_minute}},
                          {"series", rows}};
        write_text_file(out / "zone_shares.json", doc.dump(2) + "\n");
        write_text_file(out / "zone_shares.csv", csv.str());
    }
}

void run_synth(const RunConfig& config) {
    const auto stations = fixture_stations(config.synth_stations, config.seed_synth);
    const auto partition = VoronoiPartition::build(stations);

    DefaultProfiles profiles = default_profiles(partition);
    if (!config.profiles_path.empty()) {
        std::ifstream in = open_input(config.profiles_path, "profiles");
        json doc;
        try {
            in >> doc;
        } catch (const json::exception& e) {
            throw ConfigError(std::string("invalid profiles JSON: ") + e.what());
        }
        const auto load = [&](const char* key, CohortProfile& target) {
            if (doc.contains(key)) target = CohortProfile::from_json(doc.at(key).dump());
        };
        load("commuter", profiles.commuter);
        load("recreational", profiles.recreational);
        load("dockless_bike", profiles.dockless_bike);
        load("scooter", profiles.scooter);
    }

    const std::size_t n = config.synth_trips_per_cohort;
    std::vector<CleanTrip> docked = generate(profiles.commuter, n, derive_seed(config.seed_synth, 1),
                                             partition);
    const auto recreational =
        generate(profiles.recreational, n, derive_seed(config.seed_synth, 2), partition);
    docked.insert(docked.end(), recreational.begin(), recreational.end());
    std::vector<CleanTrip> dockless =
        generate(profiles.dockless_bike, n, derive_seed(config.seed_synth, 3), partition);
    const auto scooters =
        generate(profiles.scooter, n, derive_seed(config.seed_synth, 4), partition);
    dockless.insert(dockless.end(), scooters.begin(), scooters.end());

    const fs::path out(config.output_dir);
    std::ostringstream stations_csv;
    write_stations_csv(stations_csv, stations, csv_comment(config));
    write_text_file(out / "stations.csv", stations_csv.str());
    write_text_file(out / "boundary.geojson",
                    with_provenance(boundary_to_geojson(fixture_boundary()), config));
    write_text_file(out / "zones.geojson",
                    with_provenance(zones_to_geojson(fixture_zones(config.synth_zone_rows,
                                                                   config.synth_zone_cols)),
                                    config));
    std::ostringstream docked_csv;
    write_docked_csv(docked_csv, docked, partition, csv_comment(config));
    write_text_file(out / "docked.csv", docked_csv.str());
    std::ostringstream dockless_csv;
    write_dockless_csv(dockless_csv, dockless, csv_comment(config));
    write_text_file(out / "dockless.csv", dockless_csv.str());

    const json profiles_doc = {{"format_version", 1},
                               {"provenance", provenance(config)},
                               {"commuter", json::parse(profiles.commuter.to_json())},
                               {"recreational", json::parse(profiles.recreational.to_json())},
                               {"dockless_bike", json::parse(profiles.dockless_bike.to_json())},
                               {"scooter", json::parse(profiles.scooter.to_json())}};
    write_text_file(out / "profiles.json", profiles_doc.dump(2) + "\n");
}

void run_pipeline(const RunConfig& config) {
    run_clean(config);
    run_partition(config);
    run_train(config);
    run_evaluate(config);
    run_classify(config);
    run_analyze(config);
}

} // namespace mobility

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "mobility/error.hpp"
#include "mobility/pipeline.hpp"

namespace {

struct Overrides {
    std::optional<std::string> output_dir;
    std::optional<std::string> docked, dockless, stations, boundary, zones, cleaned, profiles;
    std::optional<std::string> cm_fixture;
    std::optional<std::uint64_t> seed_downsample, seed_split, seed_logistic, seed_forest,
        seed_synth, seed_grid;
    std::optional<std::size_t> synth_stations, trips_per_cohort;
    std::optional<int> threads;
    std::optional<bool> grid;
};

void apply_overrides(mobility::RunConfig& config, const Overrides& o) {
    // Flags win over the file; the env var sits between them for output_dir.
    if (const char* env = std::getenv("MOBILITY_OUTPUT_DIR")) config.output_dir = env;
    if (o.output_dir) config.output_dir = *o.output_dir;
    if (o.docked) config.docked_path = *o.docked;
    if (o.dockless) config.dockless_path = *o.dockless;
    if (o.stations) config.stations_path = *o.stations;
    if (o.boundary) config.boundary_path = *o.boundary;
    if (o.zones) config.zones_path = *o.zones;
    if (o.cleaned) config.cleaned_path = *o.cleaned;
    if (o.profiles) config.profiles_path = *o.profiles;
    if (o.cm_fixture) config.cm_fixture_path = *o.cm_fixture;
    if (o.seed_downsample) config.seed_downsample = *o.seed_downsample;
    if (o.seed_split) config.seed_split = *o.seed_split;
    if (o.seed_logistic) config.seed_logistic = *o.seed_logistic;
    if (o.seed_forest) config.seed_forest = *o.seed_forest;
    if (o.seed_synth) config.seed_synth = *o.seed_synth;
    if (o.seed_grid) config.seed_grid = *o.seed_grid;
    if (o.synth_stations) config.synth_stations = *o.synth_stations;
    if (o.trips_per_cohort) config.synth_trips_per_cohort = *o.trips_per_cohort;
    if (o.threads) config.forest.threads = *o.threads;
    if (o.grid) config.grid_search_enabled = *o.grid;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shared-mobility trip analysis: clean, partition, train, evaluate, classify, "
                 "analyze, synth, pipeline"};
    app.require_subcommand(1);
    app.fallthrough(); // global options may follow the subcommand

    std::string config_path;
    Overrides overrides;

    app.add_option("-c,--config", config_path, "Run configuration JSON file");
    app.add_option("-o,--output-dir", overrides.output_dir,
                   "Output directory (overrides config and MOBILITY_OUTPUT_DIR)");
    app.add_option("--docked", overrides.docked, "Docked trips CSV");
    app.add_option("--dockless", overrides.dockless, "Dockless trips CSV");
    app.add_option("--stations", overrides.stations, "Stations CSV (id,name,lat,lon)");
    app.add_option("--boundary", overrides.boundary, "Service boundary GeoJSON");
    app.add_option("--zones", overrides.zones, "Aggregation zones GeoJSON");
    app.add_option("--cleaned", overrides.cleaned, "Cleaned trips CSV (output of `clean`)");
    app.add_option("--profiles", overrides.profiles, "Synthetic cohort profiles JSON");
    app.add_option("--seed-downsample", overrides.seed_downsample, "Downsampling seed");
    app.add_option("--seed-split", overrides.seed_split, "Train/test split seed");
    app.add_option("--seed-logistic", overrides.seed_logistic, "Logistic training seed");
    app.add_option("--seed-forest", overrides.seed_forest, "Forest training seed");
    app.add_option("--seed-synth", overrides.seed_synth, "Synthetic generator seed");
    app.add_option("--seed-grid", overrides.seed_grid, "Grid-search validation seed");
    app.add_option("--threads", overrides.threads, "Forest training threads (0 = hardware)");

    auto* cmd_clean = app.add_subcommand("clean", "Parse raw trips, apply the exclusion rules");
    auto* cmd_partition = app.add_subcommand("partition", "Export Voronoi cells as GeoJSON");
    auto* cmd_train = app.add_subcommand("train", "Featurize, balance, split and train models");
    cmd_train->add_flag("--grid,!--no-grid", overrides.grid,
                        "Grid-search forest hyperparameters");
    auto* cmd_evaluate = app.add_subcommand("evaluate", "Confusion matrices and metric reports");
    cmd_evaluate->add_option("--cm-fixture", overrides.cm_fixture,
                             "Compute metrics for a confusion-matrix JSON fixture");
    auto* cmd_classify =
        app.add_subcommand("classify", "Apply trained models to the dockless cohorts");
    auto* cmd_analyze = app.add_subcommand("analyze", "Descriptive temporal/spatial series");
    auto* cmd_synth = app.add_subcommand("synth", "Generate the synthetic desk-scale fixture");
    cmd_synth->add_option("--stations-count", overrides.synth_stations,
                          "Number of synthetic stations");
    cmd_synth->add_option("--trips-per-cohort", overrides.trips_per_cohort,
                          "Synthetic trips per cohort");
    auto* cmd_pipeline =
        app.add_subcommand("pipeline", "clean + partition + train + evaluate + classify + analyze");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        mobility::RunConfig config;
        if (!config_path.empty()) config = mobility::RunConfig::from_json_file(config_path);
        apply_overrides(config, overrides);

        if (cmd_clean->parsed()) mobility::run_clean(config);
        else if (cmd_partition->parsed()) mobility::run_partition(config);
        else if (cmd_train->parsed()) mobility::run_train(config);
        else if (cmd_evaluate->parsed()) mobility::run_evaluate(config);
        else if (cmd_classify->parsed()) mobility::run_classify(config);
        else if (cmd_analyze->parsed()) mobility::run_analyze(config);
        else if (cmd_synth->parsed()) mobility::run_synth(config);
        else if (cmd_pipeline->parsed()) mobility::run_pipeline(config);
        return 0;
    } catch (const mobility::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const mobility::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

#pragma once

#include <cstdint>
#include <string>

#include "mobility/ingest.hpp"
#include "mobility/models.hpp"
#include "mobility/sampling.hpp"

namespace mobility {

/// One run configuration drives every subcommand. Values come from the JSON
/// config file; command-line flags override file values; the output
/// directory may additionally be overridden by MOBILITY_OUTPUT_DIR
/// (flag > environment > file).
struct RunConfig {
    // input files
    std::string docked_path;
    std::string dockless_path;
    std::string stations_path;
    std::string boundary_path;
    std::string zones_path;
    std::string cleaned_path; // defaults to <output_dir>/cleaned_trips.csv

    DockedColumns docked_columns;
    DocklessColumns dockless_columns;
    CleanConfig cleaning;

    double train_fraction = 0.8;
    double similarity_tolerance = 0.05;
    LogisticConfig logistic;
    ForestHyperparams forest;
    bool grid_search_enabled = false;

    std::size_t synth_stations = 269;
    std::size_t synth_trips_per_cohort = 5'000;
    int synth_zone_rows = 8;
    int synth_zone_cols = 8;
    std::string profiles_path;

    int morning_window_begin_minute = 7 * 60;
    int morning_window_end_minute = 9 * 60;

    std::uint64_t seed_downsample = 1;
    std::uint64_t seed_split = 2;
    std::uint64_t seed_logistic = 3;
    std::uint64_t seed_forest = 4;
    std::uint64_t seed_synth = 5;
    std::uint64_t seed_grid = 6;

    std::string output_dir = "out";

    // Path of a confusion-matrix fixture; when set, `evaluate` computes the
    // metric report for it instead of re-deriving the test split.
    std::string cm_fixture_path;

    static RunConfig from_json_file(const std::string& path);
    std::string to_canonical_json() const;
    /// FNV-1a hash of the canonical JSON; stamped into every output.
    std::string config_hash() const;

    std::string effective_cleaned_path() const;
};

// Subcommand bodies. Each writes its output files under config.output_dir
// and throws ConfigError/DataError on failure.
void run_clean(const RunConfig& config);
void run_partition(const RunConfig& config);
void run_train(const RunConfig& config);
void run_evaluate(const RunConfig& config);
void run_classify(const RunConfig& config);
void run_analyze(const RunConfig& config);
void run_synth(const RunConfig& config);
void run_pipeline(const RunConfig& config);

} // namespace mobility

// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exits non-zero if any fail.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <sys/wait.h>
#include <vector>

#include "json.hpp"

#include "mobility/analytics.hpp"
#include "mobility/error.hpp"
#include "mobility/eval.hpp"
#include "mobility/features.hpp"
#include "mobility/models.hpp"
#include "mobility/rng.hpp"
#include "mobility/sampling.hpp"
#include "mobility/synth.hpp"

using namespace mobility;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void expect(bool condition, const std::string& message) {
    if (!condition) throw Failure(message);
}

void expect_near(double actual, double published, double tolerance, const std::string& what) {
    if (std::abs(actual - published) > tolerance) {
        std::ostringstream out;
        out << what << ": got " << actual << ", published " << published << ", tolerance "
            << tolerance;
        throw Failure(out.str());
    }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---- criterion 1: published confusion counts -> published metrics ----

std::string criterion_metric_oracle() {
    ConfusionMatrix lr;
    lr.counts = {{{33'363, 10'011}, {6'443, 37'186}}};
    const MetricsReport lr_report = metrics(lr);
    expect_near(lr_report.casual.precision, 0.84, 0.005, "LR casual precision");
    expect_near(lr_report.casual.recall, 0.77, 0.005, "LR casual recall");
    expect_near(lr_report.casual.f1, 0.80, 0.005, "LR casual F1");
    expect_near(lr_report.member.precision, 0.79, 0.005, "LR member precision");
    expect_near(lr_report.member.recall, 0.85, 0.005, "LR member recall");
    expect_near(lr_report.member.f1, 0.82, 0.005, "LR member F1");
    expect_near(lr_report.average.precision, 0.81, 0.005, "LR average precision");
    expect_near(lr_report.average.recall, 0.81, 0.005, "LR average recall");
    expect_near(lr_report.average.f1, 0.81, 0.005, "LR average F1");
    expect(lr_report.casual.support == 43'374 && lr_report.member.support == 43'629 &&
               lr_report.average.support == 87'003,
           "LR supports");

    ConfusionMatrix rf;
    rf.counts = {{{36'293, 7'081}, {6'662, 36'967}}};
    const MetricsReport rf_report = metrics(rf);
    expect_near(rf_report.casual.precision, 0.84, 0.005, "RF casual precision");
    expect_near(rf_report.casual.recall, 0.84, 0.005, "RF casual recall");
    expect_near(rf_report.casual.f1, 0.84, 0.005, "RF casual F1");
    expect_near(rf_report.member.precision, 0.84, 0.005, "RF member precision");
    expect_near(rf_report.member.recall, 0.85, 0.005, "RF member recall");
    expect_near(rf_report.member.f1, 0.84, 0.005, "RF member F1");
    expect_near(rf_report.average.precision, 0.84, 0.005, "RF average precision");
    expect_near(rf_report.average.recall, 0.84, 0.005, "RF average recall");
    expect_near(rf_report.average.f1, 0.84, 0.005, "RF average F1");
    return "";
}

// ---- criterion 2: published cohort shares and the overall member share ----

std::string criterion_cohort_shares() {
    const CohortShareReport rf_bikes{"dockless_bike", 71'590, 25'894, 45'696};
    expect_near(100.0 * rf_bikes.member_share(), 63.8, 0.05, "RF dockless-bike share");
    const CohortShareReport rf_scooters{"scooter", 187'909, 57'073, 130'836};
    expect_near(100.0 * rf_scooters.member_share(), 69.6, 0.05, "RF scooter share");

    const CohortShareReport lr_bikes{"dockless_bike", 71'590, 24'774, 46'816};
    expect_near(100.0 * lr_bikes.member_share(), 65.4, 0.05, "LR dockless-bike share (computed)");
    expect_near(100.0 * lr_bikes.member_share(), 65.3, 0.15, "LR dockless-bike share (published)");
    const CohortShareReport lr_scooters{"scooter", 187'909, 52'822, 135'087};
    expect_near(100.0 * lr_scooters.member_share(), 71.9, 0.05, "LR scooter share (computed)");
    expect_near(100.0 * lr_scooters.member_share(), 71.8, 0.15, "LR scooter share (published)");

    const double cabi_member_share = 100.0 * 599'473.0 / 816'980.0;
    expect_near(cabi_member_share, 73.3, 0.1, "overall CaBi member share");
    expect(cabi_member_share >= 73.3 && cabi_member_share <= 73.4,
           "overall CaBi member share in [73.3, 73.4]");
    return "";
}

// ---- criterion 3: downsample + floor split counts at the published scale ----

std::string criterion_split_counts() {
    const auto start = std::chrono::steady_clock::now();
    expect(static_cast<std::size_t>(std::floor(0.8 * 435'014.0)) == 348'011,
           "floor(0.8 * 435014) arithmetic");
    expect(435'014 - 348'011 == 87'003, "test-count arithmetic");

    LabeledDataset d;
    d.x.reserve(816'980);
    d.y.reserve(816'980);
    for (std::size_t i = 0; i < 816'980; ++i) {
        d.x.push_back({static_cast<double>(i)});
        d.y.push_back(i < 599'473 ? 1 : 0);
    }
    const LabeledDataset balanced = downsample(d, 20'240'101);
    expect(balanced.count(1) == 217'507, "balanced member count");
    expect(balanced.count(0) == 217'507, "balanced casual count");
    const SplitResult parts = split(balanced, 0.8, 20'240'102);
    expect(parts.train.size() == 348'011, "train size");
    expect(parts.test.size() == 87'003, "test size 87,003");
    const double elapsed = seconds_since(start);
    expect(elapsed < 30.0, "runtime " + std::to_string(elapsed) + "s exceeds 30s");
    std::ostringstream detail;
    detail << elapsed << "s";
    return detail.str();
}

// ---- criterion 4: Voronoi assignment vs the brute-force oracle ----

std::string criterion_voronoi_exactness() {
    const auto start = std::chrono::steady_clock::now();
    const auto partition = VoronoiPartition::build(fixture_stations(269, 20'240'104));
    expect(partition.size() == 269, "269 cells");
    const Bbox box = fixture_bbox();

    SplitMix64 rng(424'242);
    std::size_t mismatches = 0;
    for (int i = 0; i < 10'000; ++i) {
        const LatLon p{box.min_lat + uniform01(rng) * (box.max_lat - box.min_lat),
                       box.min_lon + uniform01(rng) * (box.max_lon - box.min_lon)};
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
        if (partition.assign_cell(p) != expected) ++mismatches;
    }
    expect(mismatches == 0, std::to_string(mismatches) + " mismatches out of 10,000");
    const double elapsed = seconds_since(start);
    expect(elapsed < 5.0, "runtime " + std::to_string(elapsed) + "s exceeds 5s");
    std::ostringstream detail;
    detail << "0 mismatches, " << elapsed << "s";
    return detail.str();
}

// ---- criterion 5: logistic gradient vs central finite differences ----

std::string criterion_gradient_check() {
    SplitMix64 data_rng(8'088);
    LabeledDataset d;
    for (int i = 0; i < 300; ++i) {
        FeatureVector row(50);
        for (double& v : row) v = uniform01(data_rng);
        d.x.push_back(std::move(row));
        d.y.push_back(static_cast<int>(bounded(data_rng, 2)));
    }
    const double l2 = 1e-3;
    SplitMix64 rng(515);
    for (int point = 0; point < 20; ++point) {
        std::vector<double> w(50);
        for (double& v : w) v = standard_normal(rng) * 0.5;
        const double b = standard_normal(rng) * 0.5;
        std::vector<double> grad(50);
        double grad_b = 0;
        logistic_gradient(w, b, d, l2, grad, grad_b);

        const double h = 1e-6;
        double err2 = 0, norm2 = 0;
        for (std::size_t j = 0; j < w.size(); ++j) {
            std::vector<double> wp = w, wm = w;
            wp[j] += h;
            wm[j] -= h;
            const double fd = (logistic_loss(wp, b, d, l2) - logistic_loss(wm, b, d, l2)) / (2 * h);
            err2 += (fd - grad[j]) * (fd - grad[j]);
            norm2 += fd * fd;
        }
        const double fd_b =
            (logistic_loss(w, b + h, d, l2) - logistic_loss(w, b - h, d, l2)) / (2 * h);
        err2 += (fd_b - grad_b) * (fd_b - grad_b);
        norm2 += fd_b * fd_b;
        const double rel = std::sqrt(err2 / norm2);
        expect(rel <= 1e-5, "relative error " + std::to_string(rel) + " at point " +
                                std::to_string(point));
    }
    return "";
}

// ---- criterion 6: end-to-end recovery on synthetic commuter/recreational data ----

std::string criterion_end_to_end() {
    const auto start = std::chrono::steady_clock::now();
    const auto partition = VoronoiPartition::build(fixture_stations(269, 1));
    const DefaultProfiles profiles = default_profiles(partition);
    std::vector<CleanTrip> trips = generate(profiles.commuter, 10'000, 60'601, partition);
    const auto casual = generate(profiles.recreational, 10'000, 60'602, partition);
    trips.insert(trips.end(), casual.begin(), casual.end());

    const FeatureSchema schema = fit_schema(trips, partition);
    LabeledDataset dataset;
    dataset.x.reserve(trips.size());
    for (const CleanTrip& t : trips) {
        dataset.x.push_back(encode(t, partition, schema));
        dataset.y.push_back(*t.label == UserType::Member ? 1 : 0);
    }
    const SplitResult parts = split(dataset, 0.8, 60'603);

    LogisticConfig logistic_config; // library defaults
    const LogisticModel logistic = train_logistic(parts.train, logistic_config, 60'604);
    ForestHyperparams forest_params; // library defaults: 100 trees, depth 16
    const ForestModel forest = train_forest(parts.train, forest_params, 60'605);

    const auto weighted_f1 = [&](auto&& predict) {
        std::vector<int> predictions;
        predictions.reserve(parts.test.size());
        for (const FeatureVector& vec : parts.test.x) predictions.push_back(predict(vec));
        return metrics(confusion(predictions, parts.test.y)).average.f1;
    };
    const double lr_f1 = weighted_f1(
        [&](const FeatureVector& v) { return predict_logistic(logistic, v) >= 0.5 ? 1 : 0; });
    const double rf_f1 = weighted_f1(
        [&](const FeatureVector& v) { return predict_forest(forest, v) >= 0.5 ? 1 : 0; });

    expect(rf_f1 >= 0.80, "RF test F1 " + std::to_string(rf_f1) + " below 0.80");
    expect(lr_f1 >= 0.75, "LR test F1 " + std::to_string(lr_f1) + " below 0.75");
    const double elapsed = seconds_since(start);
    expect(elapsed < 60.0, "runtime " + std::to_string(elapsed) + "s exceeds 60s");
    std::ostringstream detail;
    detail << "RF F1 " << rf_f1 << ", LR F1 " << lr_f1 << ", " << elapsed << "s";
    return detail.str();
}

// ---- criterion 7: qualitative coefficient reproduction over 100 seeds ----

std::string criterion_coefficients() {
    const auto partition = VoronoiPartition::build(fixture_stations(49, 7));
    const DefaultProfiles profiles = default_profiles(partition);
    LogisticConfig config;
    config.learning_rate = 0.5;
    config.max_epochs = 150;

    int successes = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        std::vector<CleanTrip> trips =
            generate(profiles.commuter, 1'500, derive_seed(seed, 1), partition);
        const auto casual =
            generate(profiles.recreational, 1'500, derive_seed(seed, 2), partition);
        trips.insert(trips.end(), casual.begin(), casual.end());

        const FeatureSchema schema = fit_schema(trips, partition);
        LabeledDataset dataset;
        for (const CleanTrip& t : trips) {
            dataset.x.push_back(encode(t, partition, schema));
            dataset.y.push_back(*t.label == UserType::Member ? 1 : 0);
        }
        const LogisticModel model = train_logistic(dataset, config, seed);

        const double duration_weight = model.weights[schema.duration_index()];
        const CoefficientRanking ranking = top_coefficients(model, schema, 10);
        bool morning_bin = false;
        for (const auto& [feature, weight] : ranking.top_positive) {
            // 4:30 a.m. through 9:30 a.m. is bins 9..18.
            for (int bin = 9; bin <= 18; ++bin) {
                if (feature == time_bin_feature_name(bin)) morning_bin = true;
            }
        }
        if (duration_weight < 0.0 && morning_bin) ++successes;
    }
    expect(successes >= 95, "only " + std::to_string(successes) + "/100 seeds reproduced the "
                                                                  "coefficient pattern");
    return std::to_string(successes) + "/100 seeds";
}

// ---- criterion 8: forest importance properties ----

std::string criterion_importance() {
    SplitMix64 rng(3'141);
    LabeledDataset d;
    for (int i = 0; i < 500; ++i) {
        const int label = static_cast<int>(bounded(rng, 2));
        d.x.push_back({uniform01(rng), static_cast<double>(label), uniform01(rng),
                       uniform01(rng) < 0.8 ? static_cast<double>(label) : uniform01(rng)});
        d.y.push_back(label);
    }
    ForestHyperparams hp;
    hp.tree_count = 40;
    hp.max_depth = 8;
    const std::vector<double> importance = feature_importance(train_forest(d, hp, 99));
    double total = 0;
    for (double v : importance) {
        expect(v >= 0.0, "negative importance");
        total += v;
    }
    expect(std::abs(total - 1.0) <= 1e-9, "importances sum to " + std::to_string(total));

    // Perfectly separable single feature: forests of single splits must put
    // the whole importance mass on it.
    LabeledDataset separable;
    for (int i = 0; i < 100; ++i) {
        separable.x.push_back({i % 2 == 0 ? 1.0 : 0.0});
        separable.y.push_back(i % 2 == 0 ? 1 : 0);
    }
    ForestHyperparams single;
    single.tree_count = 20;
    const std::vector<double> concentrated =
        feature_importance(train_forest(separable, single, 5));
    expect(std::abs(concentrated[0] - 1.0) <= 1e-12,
           "single-split importance is " + std::to_string(concentrated[0]));
    return "";
}

// ---- criterion 9: the seven-trip cleaning fixture ----

std::string criterion_cleaning_fixture() {
    const Polygon boundary({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
    const auto at = [](const char* text) { return *parse_timestamp(text); };
    const auto trip = [&](const char* s, const char* e, LatLon a, LatLon b, bool cancelled) {
        RawDocklessTrip t;
        t.start_time = at(s);
        t.end_time = at(e);
        t.start_point = a;
        t.end_point = b;
        t.cancelled = cancelled;
        return t;
    };
    const std::vector<RawDocklessTrip> trips = {
        trip("2018-03-05 08:00:00", "2018-03-05 08:10:00", {0.5, 0.5}, {0.6, 0.6}, true),
        trip("2018-03-05 08:00:00", "2018-03-05 08:00:45", {0.5, 0.5}, {0.6, 0.6}, false),
        trip("2018-03-05 08:00:00", "2018-03-05 08:01:30", {0.5, 0.5}, {0.5, 0.5}, false),
        trip("2018-03-05 08:00:00", "2018-03-06 09:00:00", {0.5, 0.5}, {5.0, 5.0}, false),
        trip("2018-03-05 08:00:00", "2018-03-05 08:10:00", {3.0, 3.0}, {0.6, 0.6}, false),
        trip("2018-03-05 08:00:00", "2018-03-05 08:10:00", {0.5, 0.5}, {0.6, 0.6}, false),
        trip("2018-03-05 10:00:00", "2018-03-05 10:20:00", {0.2, 0.2}, {0.3, 0.3}, false),
    };
    const CleanResult result = clean(trips, boundary);
    expect(result.report.kept_count == 2, "kept_count 2");
    for (std::size_t i = 0; i < kCleaningRuleCount; ++i) {
        expect(result.report.removed_by_rule[i] == 1,
               std::string(kCleaningRuleNames[i]) + " count is " +
                   std::to_string(result.report.removed_by_rule[i]));
    }
    const CleanResult again = clean(result.trips, boundary);
    expect(again.report.kept_count == 2 && again.report.input_count == 2,
           "cleaning not idempotent");
    return "";
}

// ---- criterion 10: percentile bands vs the independent oracle ----

std::string criterion_percentile_oracle() {
    SplitMix64 rng(1'000'003);
    for (int round = 0; round < 1'000; ++round) {
        const std::size_t n = 1 + bounded(rng, 60);
        std::vector<double> values;
        values.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            values.push_back(std::floor(uniform01(rng) * 100.0) / 4.0);
        }
        std::vector<double> sorted = values;
        std::sort(sorted.begin(), sorted.end());
        for (double q : {0.25, 0.5, 0.75}) {
            const double h = static_cast<double>(n - 1) * q;
            const auto lo = static_cast<std::size_t>(std::floor(h));
            const double expected =
                lo + 1 < n ? sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] -
                                                                           sorted[lo])
                           : sorted[lo];
            if (percentile(values, q) != expected) {
                throw Failure("oracle mismatch at round " + std::to_string(round));
            }
        }
    }
    return "";
}

// ---- criterion 11: determinism of every seeded operation ----

int run_cli(const std::string& args) {
    const std::string command = std::string(MOBILITY_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    if (status == -1) return -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string criterion_determinism() {
    // In-process: downsample, split, both trainers, generate.
    const auto partition = VoronoiPartition::build(fixture_stations(25, 3));
    const DefaultProfiles profiles = default_profiles(partition);
    const auto trips_a = generate(profiles.dockless_bike, 400, 9, partition);
    const auto trips_b = generate(profiles.dockless_bike, 400, 9, partition);
    std::ostringstream dump_a, dump_b;
    write_dockless_csv(dump_a, trips_a);
    write_dockless_csv(dump_b, trips_b);
    expect(dump_a.str() == dump_b.str(), "generate not byte-identical");

    SplitMix64 rng(88);
    LabeledDataset d;
    for (int i = 0; i < 600; ++i) {
        d.x.push_back({uniform01(rng), uniform01(rng), uniform01(rng)});
        d.y.push_back(static_cast<int>(bounded(rng, 2)));
    }
    const auto down_a = downsample(d, 4);
    const auto down_b = downsample(d, 4);
    expect(down_a.x == down_b.x && down_a.y == down_b.y, "downsample not deterministic");
    const auto split_a = split(d, 0.8, 5);
    const auto split_b = split(d, 0.8, 5);
    expect(split_a.train.x == split_b.train.x && split_a.test.x == split_b.test.x,
           "split not deterministic");

    FeatureSchema schema; // unchecked names are fine for serialisation
    schema.names = {"f0", "f1", "f2"};
    const std::string lr_a = model_to_json(Classifier(train_logistic(d, {}, 1)), schema);
    const std::string lr_b = model_to_json(Classifier(train_logistic(d, {}, 1)), schema);
    expect(lr_a == lr_b, "logistic training not byte-identical");

    ForestHyperparams hp;
    hp.tree_count = 15;
    hp.max_depth = 6;
    hp.threads = 1;
    const std::string rf_seq = model_to_json(Classifier(train_forest(d, hp, 2)), schema);
    hp.threads = 4;
    const std::string rf_par = model_to_json(Classifier(train_forest(d, hp, 2)), schema);
    expect(rf_seq == rf_par, "forest differs across thread counts");

    // Whole pipeline through the CLI binary, twice plus a thread variation.
    const fs::path scratch =
        fs::temp_directory_path() / ("mobility_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(scratch);
    fs::create_directories(scratch);
    const auto scratch_guard = std::unique_ptr<void, std::function<void(void*)>>(
        reinterpret_cast<void*>(1), [&](void*) { fs::remove_all(scratch); });

    expect(run_cli("synth -o " + (scratch / "fixture").string() +
                   " --stations-count 36 --trips-per-cohort 800") == 0,
           "synth subcommand failed");
    const json config = {
        {"inputs",
         {{"docked", (scratch / "fixture/docked.csv").string()},
          {"dockless", (scratch / "fixture/dockless.csv").string()},
          {"stations", (scratch / "fixture/stations.csv").string()},
          {"boundary", (scratch / "fixture/boundary.geojson").string()},
          {"zones", (scratch / "fixture/zones.geojson").string()}}},
        {"forest", {{"tree_count", 20}, {"max_depth", 8}, {"min_samples_leaf", 5}}},
    };
    std::ofstream(scratch / "run.json") << config.dump();
    expect(run_cli("pipeline -c " + (scratch / "run.json").string() + " -o " +
                   (scratch / "a").string()) == 0,
           "pipeline run A failed");
    expect(run_cli("pipeline -c " + (scratch / "run.json").string() + " -o " +
                   (scratch / "b").string()) == 0,
           "pipeline run B failed");
    expect(run_cli("pipeline -c " + (scratch / "run.json").string() + " --threads 1 -o " +
                   (scratch / "c").string()) == 0,
           "pipeline run C failed");
    for (const auto& entry : fs::directory_iterator(scratch / "a")) {
        const std::string name = entry.path().filename().string();
        expect(read_file(entry.path()) == read_file(scratch / "b" / name),
               "pipeline rerun differs in " + name);
        expect(read_file(entry.path()) == read_file(scratch / "c" / name),
               "pipeline differs across thread counts in " + name);
    }
    return "";
}

struct Criterion {
    int number;
    const char* name;
    std::function<std::string()> body;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "published metrics reproduced from confusion counts", criterion_metric_oracle},
        {2, "published cohort and overall member shares", criterion_cohort_shares},
        {3, "split-count consistency (217,507 / 87,003)", criterion_split_counts},
        {4, "Voronoi exactness vs brute-force oracle", criterion_voronoi_exactness},
        {5, "logistic gradient vs finite differences", criterion_gradient_check},
        {6, "synthetic end-to-end recovery (RF >= 0.80, LR >= 0.75)", criterion_end_to_end},
        {7, "qualitative coefficient reproduction (>= 95/100 seeds)", criterion_coefficients},
        {8, "forest importance properties", criterion_importance},
        {9, "seven-trip cleaning fixture + idempotence", criterion_cleaning_fixture},
        {10, "percentile oracle agreement (1,000 multisets)", criterion_percentile_oracle},
        {11, "determinism across reruns and thread counts", criterion_determinism},
    };

    int failures = 0;
    for (const Criterion& criterion : criteria) {
        try {
            const std::string detail = criterion.body();
            std::cout << "PASS  criterion " << criterion.number << ": " << criterion.name;
            if (!detail.empty()) std::cout << "  [" << detail << "]";
            std::cout << "\n";
        } catch (const std::exception& e) {
            ++failures;
            std::cout << "FAIL  criterion " << criterion.number << ": " << criterion.name
                      << " -- " << e.what() << "\n";
        }
    }
    if (failures == 0) {
        std::cout << "all " << criteria.size() << " acceptance criteria passed\n";
    } else {
        std::cout << failures << " acceptance criteria FAILED\n";
    }
    return failures == 0 ? 0 : 1;
}

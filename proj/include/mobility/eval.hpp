#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mobility/geo.hpp"
#include "mobility/ingest.hpp"
#include "mobility/models.hpp"

namespace mobility {

/// 2x2 counts, rows = actual, columns = predicted; index 0 = Casual,
/// 1 = Member.
struct ConfusionMatrix {
    std::array<std::array<std::int64_t, 2>, 2> counts{};

    std::int64_t actual_support(int cls) const { return counts[cls][0] + counts[cls][1]; }
    std::int64_t total() const { return actual_support(0) + actual_support(1); }
};

/// Tallies aligned prediction/label sequences (1 = member). Throws DataError
/// on length mismatch.
ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> labels);

struct ClassMetrics {
    std::string label;
    std::int64_t support = 0;
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    bool degenerate = false; // some 0/0 ratio was reported as 0
};

struct MetricsReport {
    ClassMetrics casual;
    ClassMetrics member;
    ClassMetrics average; // support-weighted; support column holds the total

    std::string to_json() const;
};

/// Precision, recall and F1 per class (each class in turn as positive), plus
/// the support-weighted average row. 0/0 ratios report 0 and set the
/// degenerate flag instead of throwing.
MetricsReport metrics(const ConfusionMatrix& cm);

struct CohortShareReport {
    std::string cohort;
    std::size_t total = 0;
    std::size_t predicted_casual = 0;
    std::size_t predicted_member = 0;

    double member_share() const {
        return static_cast<double>(predicted_member) / static_cast<double>(total);
    }
    std::string to_json() const;
};

/// Encodes each trip (duration clamped to the schema range), predicts and
/// tallies. Throws DataError on an empty cohort.
CohortShareReport classify_cohort(const Classifier& model, std::span<const CleanTrip> trips,
                                  const VoronoiPartition& partition, const FeatureSchema& schema,
                                  const std::string& cohort_name);

// Aligned-column text mirroring the shapes of the published tables.
std::string format_confusion_table(const ConfusionMatrix& cm, const std::string& title);
std::string format_metrics_table(const MetricsReport& report, const std::string& title);
std::string format_cohort_table(std::span<const CohortShareReport> reports,
                                const std::string& model_name);

} // namespace mobility

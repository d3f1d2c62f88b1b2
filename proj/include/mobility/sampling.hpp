#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mobility/dataset.hpp"

namespace mobility {

/// Shrinks the majority class to the minority count by uniform sampling
/// without replacement; the minority class is untouched and input order is
/// preserved. Throws DataError when a class is absent.
LabeledDataset downsample(const LabeledDataset& dataset, std::uint64_t seed);

struct SplitResult {
    LabeledDataset train;
    LabeledDataset test;
};

/// Uniform random partition with |train| = floor(fraction * N). Input order
/// is preserved within each side.
SplitResult split(const LabeledDataset& dataset, double train_fraction, std::uint64_t seed);

struct StatComparison {
    std::string name; // e.g. "member/duration_mean"
    double sample_value = 0;
    double population_value = 0;
    double rel_diff = 0;
    bool flagged = false;
};

struct SimilarityReport {
    double tolerance = 0;
    bool any_flagged = false;
    std::vector<StatComparison> stats;

    std::string to_json() const;
};

/// Compares per class: duration mean and 25/50/75th percentiles (durations
/// recovered through the schema's min-max bounds) plus the day-of-week share
/// vector, which is compared in aggregate as an L1 relative difference.
/// Any statistic with relative difference above `tolerance` is flagged.
SimilarityReport distribution_check(const LabeledDataset& sample,
                                    const LabeledDataset& population,
                                    const FeatureSchema& schema, double tolerance = 0.05);

} // namespace mobility

#pragma once

#include <span>
#include <string>
#include <vector>

#include "mobility/geo.hpp"
#include "mobility/ingest.hpp"

namespace mobility {

using FeatureVector = std::vector<double>;

/// Fixed feature layout: 7 day-of-week one-hots, 48 half-hour start-time
/// one-hots, C start-cell one-hots, C end-cell one-hots, and one min-max
/// scaled duration entry (C = partition cell count).
struct FeatureSchema {
    std::vector<std::string> names;
    std::vector<std::string> cell_ids; // partition station ids in cell order
    double duration_min_s = 0;
    double duration_max_s = 0;

    static constexpr std::size_t kDayOffset = 0;
    static constexpr std::size_t kBinOffset = 7;
    static constexpr std::size_t kCellOffset = 55; // 7 + 48

    std::size_t cell_count() const { return cell_ids.size(); }
    std::size_t start_cell_offset() const { return kCellOffset; }
    std::size_t end_cell_offset() const { return kCellOffset + cell_count(); }
    std::size_t duration_index() const { return kCellOffset + 2 * cell_count(); }
    std::size_t size() const { return names.size(); }

    double scale_duration(double duration_s) const;

    std::string to_json() const;
    static FeatureSchema from_json(const std::string& text);
};

/// Half-open 30-minute start-time bins: bin = 2*hour + (minute >= 30).
int time_bin(CivilSeconds instant);

/// Name of a schema feature group member, e.g. day_mon, time_0430.
std::string day_feature_name(int day);
std::string time_bin_feature_name(int bin);

/// Duration bounds come from the supplied training trips only; inference-time
/// durations outside the range clamp to [0, 1]. Throws DataError when fewer
/// than two distinct durations exist (degenerate scaling).
FeatureSchema fit_schema(std::span<const CleanTrip> training_trips,
                         const VoronoiPartition& partition);

FeatureVector encode(const CleanTrip& trip, const VoronoiPartition& partition,
                     const FeatureSchema& schema);

struct DecodedFeatures {
    int day = 0;
    int bin = 0;
    std::size_t start_cell = 0;
    std::size_t end_cell = 0;
    double scaled_duration = 0;
};

/// Recovers the one-hot groups of an encoded vector; throws DataError if any
/// group does not contain exactly one 1.
DecodedFeatures decode(const FeatureVector& vec, const FeatureSchema& schema);

} // namespace mobility

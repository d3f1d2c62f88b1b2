#include "mobility/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"

#include "mobility/error.hpp"

namespace mobility {

namespace {
const char* kDayNames[7] = {"mon", "tue", "wed", "thu", "fri", "sat", "sun"};
}

std::string day_feature_name(int day) { return std::string("day_") + kDayNames[day]; }

std::string time_bin_feature_name(int bin) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "time_%02d%02d", bin / 2, (bin % 2) * 30);
    return buf;
}

double FeatureSchema::scale_duration(double duration_s) const {
    const double s = (duration_s - duration_min_s) / (duration_max_s - duration_min_s);
    return std::clamp(s, 0.0, 1.0);
}

std::string FeatureSchema::to_json() const {
    return nlohmann::json{{"format_version", 1},
                          {"feature_names", names},
                          {"cell_ids", cell_ids},
                          {"duration_min_s", duration_min_s},
                          {"duration_max_s", duration_max_s}}
        .dump(2);
}

FeatureSchema FeatureSchema::from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
        FeatureSchema schema;
        schema.names = doc.at("feature_names").get<std::vector<std::string>>();
        schema.cell_ids = doc.at("cell_ids").get<std::vector<std::string>>();
        schema.duration_min_s = doc.at("duration_min_s").get<double>();
        schema.duration_max_s = doc.at("duration_max_s").get<double>();
        if (schema.names.size() != 56 + 2 * schema.cell_ids.size()) {
            throw ConfigError("feature schema: name count does not match cell count");
        }
        return schema;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid feature schema JSON: ") + e.what());
    }
}

int time_bin(CivilSeconds instant) {
    const int minute = minute_of_day(instant);
    return 2 * (minute / 60) + (minute % 60 >= 30 ? 1 : 0);
}

FeatureSchema fit_schema(std::span<const CleanTrip> training_trips,
                         const VoronoiPartition& partition) {
    double min_d = 0, max_d = 0;
    bool first = true;
    for (const CleanTrip& t : training_trips) {
        if (first) {
            min_d = max_d = t.duration_s;
            first = false;
        } else {
            min_d = std::min(min_d, t.duration_s);
            max_d = std::max(max_d, t.duration_s);
        }
    }
    if (first || min_d == max_d) {
        throw DataError("degenerate duration scaling: need at least two distinct "
                        "training durations");
    }

    FeatureSchema schema;
    schema.duration_min_s = min_d;
    schema.duration_max_s = max_d;
    schema.cell_ids.reserve(partition.size());
    for (const Station& s : partition.stations()) schema.cell_ids.push_back(s.id);

    schema.names.reserve(56 + 2 * partition.size());
    for (int d = 0; d < 7; ++d) schema.names.push_back(day_feature_name(d));
    for (int b = 0; b < 48; ++b) schema.names.push_back(time_bin_feature_name(b));
    for (const std::string& id : schema.cell_ids) schema.names.push_back("start:" + id);
    for (const std::string& id : schema.cell_ids) schema.names.push_back("end:" + id);
    schema.names.push_back("duration");
    return schema;
}

FeatureVector encode(const CleanTrip& trip, const VoronoiPartition& partition,
                     const FeatureSchema& schema) {
    FeatureVector vec(schema.size(), 0.0);
    vec[FeatureSchema::kDayOffset + weekday(trip.start_instant)] = 1.0;
    vec[FeatureSchema::kBinOffset + time_bin(trip.start_instant)] = 1.0;
    vec[schema.start_cell_offset() + partition.cell_index(trip.start_loc.point)] = 1.0;
    vec[schema.end_cell_offset() + partition.cell_index(trip.end_loc.point)] = 1.0;
    vec[schema.duration_index()] = schema.scale_duration(trip.duration_s);
    return vec;
}

namespace {

std::size_t sole_hot(const FeatureVector& vec, std::size_t offset, std::size_t count) {
    std::size_t found = count;
    for (std::size_t i = 0; i < count; ++i) {
        const double v = vec[offset + i];
        if (v == 1.0) {
            if (found != count) throw DataError("one-hot group has more than one 1");
            found = i;
        } else if (v != 0.0) {
            throw DataError("one-hot group has a non-binary entry");
        }
    }
    if (found == count) throw DataError("one-hot group has no 1");
    return found;
}

} // namespace

DecodedFeatures decode(const FeatureVector& vec, const FeatureSchema& schema) {
    if (vec.size() != schema.size()) throw DataError("feature vector length mismatch");
    DecodedFeatures d;
    d.day = static_cast<int>(sole_hot(vec, FeatureSchema::kDayOffset, 7));
    d.bin = static_cast<int>(sole_hot(vec, FeatureSchema::kBinOffset, 48));
    d.start_cell = sole_hot(vec, schema.start_cell_offset(), schema.cell_count());
    d.end_cell = sole_hot(vec, schema.end_cell_offset(), schema.cell_count());
    d.scaled_duration = vec[schema.duration_index()];
    return d;
}

} // namespace mobility

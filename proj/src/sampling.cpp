#include "mobility/sampling.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "json.hpp"

#include "mobility/analytics.hpp"
#include "mobility/error.hpp"
#include "mobility/rng.hpp"

namespace mobility {

namespace {

LabeledDataset take(const LabeledDataset& dataset, std::vector<std::size_t> indices) {
    std::sort(indices.begin(), indices.end());
    LabeledDataset out;
    out.x.reserve(indices.size());
    out.y.reserve(indices.size());
    for (std::size_t i : indices) {
        out.x.push_back(dataset.x[i]);
        out.y.push_back(dataset.y[i]);
    }
    return out;
}

} // namespace

LabeledDataset downsample(const LabeledDataset& dataset, std::uint64_t seed) {
    std::vector<std::size_t> casual, member;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        (dataset.y[i] == 1 ? member : casual).push_back(i);
    }
    if (casual.empty() || member.empty()) {
        throw DataError("downsample requires both classes to be present");
    }
    std::vector<std::size_t>& majority = member.size() >= casual.size() ? member : casual;
    const std::size_t target = std::min(member.size(), casual.size());

    SplitMix64 rng(seed);
    // Partial Fisher-Yates: the first `target` entries are a uniform draw
    // without replacement.
    for (std::size_t i = 0; i < target; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(bounded(rng, majority.size() - i));
        std::swap(majority[i], majority[j]);
    }
    majority.resize(target);

    std::vector<std::size_t> keep;
    keep.reserve(2 * target);
    keep.insert(keep.end(), casual.begin(), casual.end());
    keep.insert(keep.end(), member.begin(), member.end());
    return take(dataset, std::move(keep));
}

SplitResult split(const LabeledDataset& dataset, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ConfigError("train_fraction must be in (0, 1)");
    }
    SplitMix64 rng(seed);
    const std::vector<std::size_t> order = shuffled_indices(dataset.size(), rng);
    const std::size_t train_n =
        static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(dataset.size())));
    SplitResult result;
    result.train = take(dataset, {order.begin(), order.begin() + train_n});
    result.test = take(dataset, {order.begin() + train_n, order.end()});
    return result;
}

namespace {

struct ClassStats {
    std::size_t count = 0;
    double mean = 0, p25 = 0, p50 = 0, p75 = 0;
    std::array<double, 7> day_shares{};
};

ClassStats class_stats(const LabeledDataset& data, int label, const FeatureSchema& schema) {
    ClassStats s;
    std::vector<double> durations;
    std::array<std::size_t, 7> day_counts{};
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.y[i] != label) continue;
        ++s.count;
        const FeatureVector& v = data.x[i];
        const double scaled = v[schema.duration_index()];
        durations.push_back(schema.duration_min_s +
                            scaled * (schema.duration_max_s - schema.duration_min_s));
        for (int d = 0; d < 7; ++d) {
            if (v[FeatureSchema::kDayOffset + d] == 1.0) {
                ++day_counts[d];
                break;
            }
        }
    }
    if (s.count == 0) return s;
    double sum = 0;
    for (double d : durations) sum += d;
    s.mean = sum / static_cast<double>(s.count);
    s.p25 = percentile(durations, 0.25);
    s.p50 = percentile(durations, 0.50);
    s.p75 = percentile(durations, 0.75);
    for (int d = 0; d < 7; ++d) {
        s.day_shares[d] = static_cast<double>(day_counts[d]) / static_cast<double>(s.count);
    }
    return s;
}

double rel_diff(double sample, double population) {
    if (population == 0.0) return sample == 0.0 ? 0.0 : 1e9;
    return std::abs(sample - population) / std::abs(population);
}

} // namespace

SimilarityReport distribution_check(const LabeledDataset& sample,
                                    const LabeledDataset& population,
                                    const FeatureSchema& schema, double tolerance) {
    if (sample.size() == 0 || population.size() == 0) {
        throw DataError("distribution_check requires non-empty sample and population");
    }
    SimilarityReport report;
    report.tolerance = tolerance;
    for (int label : {0, 1}) {
        const std::string prefix = (label == 1 ? "member/" : "casual/");
        const ClassStats pop = class_stats(population, label, schema);
        if (pop.count == 0) continue;
        const ClassStats smp = class_stats(sample, label, schema);
        if (smp.count == 0) {
            report.stats.push_back({prefix + "present", 0.0, 1.0, 1e9, true});
            report.any_flagged = true;
            continue;
        }
        const auto add = [&](const std::string& name, double sv, double pv) {
            const double rd = rel_diff(sv, pv);
            const bool flag = rd > tolerance;
            report.stats.push_back({prefix + name, sv, pv, rd, flag});
            report.any_flagged = report.any_flagged || flag;
        };
        add("duration_mean", smp.mean, pop.mean);
        add("duration_p25", smp.p25, pop.p25);
        add("duration_p50", smp.p50, pop.p50);
        add("duration_p75", smp.p75, pop.p75);
        // Day-of-week shares are one vector-valued statistic: L1 difference
        // relative to total mass 1.
        double l1 = 0;
        for (int d = 0; d < 7; ++d) l1 += std::abs(smp.day_shares[d] - pop.day_shares[d]);
        const bool flag = l1 > tolerance;
        report.stats.push_back({prefix + "day_share_l1", l1, 1.0, l1, flag});
        report.any_flagged = report.any_flagged || flag;
    }
    return report;
}

std::string SimilarityReport::to_json() const {
    nlohmann::json stats_json = nlohmann::json::array();
    for (const StatComparison& s : stats) {
        stats_json.push_back({{"name", s.name},
                              {"sample", s.sample_value},
                              {"population", s.population_value},
                              {"rel_diff", s.rel_diff},
                              {"flagged", s.flagged}});
    }
    return nlohmann::json{
        {"tolerance", tolerance}, {"any_flagged", any_flagged}, {"stats", stats_json}}
        .dump(2);
}

} // namespace mobility

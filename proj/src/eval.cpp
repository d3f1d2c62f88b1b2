#include "mobility/eval.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "mobility/error.hpp"

namespace mobility {

ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> labels) {
    if (predictions.size() != labels.size()) {
        throw DataError("confusion: predictions and labels differ in length");
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        ++cm.counts[labels[i] ? 1 : 0][predictions[i] ? 1 : 0];
    }
    return cm;
}

namespace {

ClassMetrics class_metrics(const ConfusionMatrix& cm, int positive, const char* label) {
    const int negative = 1 - positive;
    const auto tp = static_cast<double>(cm.counts[positive][positive]);
    const auto fp = static_cast<double>(cm.counts[negative][positive]);
    const auto fn = static_cast<double>(cm.counts[positive][negative]);

    ClassMetrics m;
    m.label = label;
    m.support = cm.actual_support(positive);
    if (tp + fp > 0) {
        m.precision = tp / (tp + fp);
    } else {
        m.degenerate = true;
    }
    if (tp + fn > 0) {
        m.recall = tp / (tp + fn);
    } else {
        m.degenerate = true;
    }
    if (m.precision + m.recall > 0) {
        m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    } else {
        m.degenerate = true;
    }
    return m;
}

nlohmann::json class_metrics_json(const ClassMetrics& m) {
    return {{"label", m.label},      {"support", m.support}, {"precision", m.precision},
            {"recall", m.recall},    {"f1", m.f1},           {"degenerate", m.degenerate}};
}

} // namespace

MetricsReport metrics(const ConfusionMatrix& cm) {
    MetricsReport report;
    report.casual = class_metrics(cm, 0, "casual");
    report.member = class_metrics(cm, 1, "member");

    const double total = static_cast<double>(report.casual.support + report.member.support);
    report.average.label = "average/total";
    report.average.support = report.casual.support + report.member.support;
    report.average.degenerate = report.casual.degenerate || report.member.degenerate;
    if (total > 0) {
        const double wc = static_cast<double>(report.casual.support) / total;
        const double wm = static_cast<double>(report.member.support) / total;
        report.average.precision = wc * report.casual.precision + wm * report.member.precision;
        report.average.recall = wc * report.casual.recall + wm * report.member.recall;
        report.average.f1 = wc * report.casual.f1 + wm * report.member.f1;
    } else {
        report.average.degenerate = true;
    }
    return report;
}

std::string MetricsReport::to_json() const {
    return nlohmann::json{{"casual", class_metrics_json(casual)},
                          {"member", class_metrics_json(member)},
                          {"average", class_metrics_json(average)}}
        .dump(2);
}

std::string CohortShareReport::to_json() const {
    return nlohmann::json{{"cohort", cohort},
                          {"total", total},
                          {"predicted_casual", predicted_casual},
                          {"predicted_member", predicted_member},
                          {"member_share_pct", 100.0 * member_share()}}
        .dump(2);
}

CohortShareReport classify_cohort(const Classifier& model, std::span<const CleanTrip> trips,
                                  const VoronoiPartition& partition, const FeatureSchema& schema,
                                  const std::string& cohort_name) {
    if (trips.empty()) throw DataError("classify_cohort: empty cohort " + cohort_name);
    CohortShareReport report;
    report.cohort = cohort_name;
    report.total = trips.size();
    for (const CleanTrip& t : trips) {
        const FeatureVector vec = encode(t, partition, schema);
        if (predict_member(model, vec)) {
            ++report.predicted_member;
        } else {
            ++report.predicted_casual;
        }
    }
    return report;
}

std::string format_confusion_table(const ConfusionMatrix& cm, const std::string& title) {
    std::ostringstream out;
    out << title << "\n";
    out << "                     Predicted casual   Predicted member\n";
    char buf[96];
    std::snprintf(buf, sizeof(buf), "Actual casual %19lld %18lld\n",
                  static_cast<long long>(cm.counts[0][0]), static_cast<long long>(cm.counts[0][1]));
    out << buf;
    std::snprintf(buf, sizeof(buf), "Actual member %19lld %18lld\n",
                  static_cast<long long>(cm.counts[1][0]), static_cast<long long>(cm.counts[1][1]));
    out << buf;
    return out.str();
}

std::string format_metrics_table(const MetricsReport& report, const std::string& title) {
    std::ostringstream out;
    out << title << "\n";
    out << "               Test sample   Precision   Recall   F1-score\n";
    char buf[96];
    for (const ClassMetrics* m : {&report.casual, &report.member, &report.average}) {
        std::snprintf(buf, sizeof(buf), "%-14s %11lld %11.2f %8.2f %10.2f\n", m->label.c_str(),
                      static_cast<long long>(m->support), m->precision, m->recall, m->f1);
        out << buf;
    }
    return out.str();
}

std::string format_cohort_table(std::span<const CohortShareReport> reports,
                                const std::string& model_name) {
    std::ostringstream out;
    out << "Predicted behaviour (" << model_name << ")\n";
    out << "Cohort                     Casual       Member   Member share    Total\n";
    char buf[128];
    for (const CohortShareReport& r : reports) {
        std::snprintf(buf, sizeof(buf), "%-22s %10zu %12zu %13.1f%% %8zu\n", r.cohort.c_str(),
                      r.predicted_casual, r.predicted_member, 100.0 * r.member_share(), r.total);
        out << buf;
    }
    return out.str();
}

} // namespace mobility

#include <algorithm>
#include <cmath>

#include "mobility/error.hpp"
#include "mobility/models.hpp"

namespace mobility {

namespace {

// Compressed-row view of the dataset. One-hot heavy vectors make the dense
// loops ~100x slower; skipping exact zeros changes no result because x + 0.0
// and 0.0 * w contribute nothing to the accumulators.
struct SparseRows {
    std::vector<std::uint32_t> col;
    std::vector<double> val;
    std::vector<std::size_t> row_start; // size n+1
    std::size_t feature_count = 0;

    explicit SparseRows(const LabeledDataset& data) {
        const std::size_t n = data.size();
        feature_count = n ? data.x[0].size() : 0;
        row_start.reserve(n + 1);
        row_start.push_back(0);
        for (const FeatureVector& row : data.x) {
            if (row.size() != feature_count) {
                throw DataError("feature vectors do not conform to one schema");
            }
            for (std::size_t j = 0; j < row.size(); ++j) {
                if (row[j] != 0.0) {
                    col.push_back(static_cast<std::uint32_t>(j));
                    val.push_back(row[j]);
                }
            }
            row_start.push_back(col.size());
        }
    }

    double dot(std::span<const double> weights, std::size_t i) const {
        double z = 0;
        for (std::size_t k = row_start[i]; k < row_start[i + 1]; ++k) {
            z += weights[col[k]] * val[k];
        }
        return z;
    }
};

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double loss_impl(const SparseRows& rows, std::span<const int> y,
                 std::span<const double> weights, double intercept, double l2) {
    const std::size_t n = y.size();
    double ce = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = intercept + rows.dot(weights, i);
        // max(z,0) - y*z + log1p(exp(-|z|)), numerically stable for large |z|.
        ce += std::max(z, 0.0) - static_cast<double>(y[i]) * z + std::log1p(std::exp(-std::abs(z)));
    }
    double reg = 0;
    for (double w : weights) reg += w * w;
    return ce / static_cast<double>(n) + 0.5 * l2 * reg;
}

// Gradient of the data term only (no regularisation).
void data_gradient_impl(const SparseRows& rows, std::span<const int> y,
                        std::span<const double> weights, double intercept,
                        std::span<double> grad_weights, double& grad_intercept) {
    std::fill(grad_weights.begin(), grad_weights.end(), 0.0);
    grad_intercept = 0;
    const std::size_t n = y.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double err = sigmoid(intercept + rows.dot(weights, i)) - static_cast<double>(y[i]);
        grad_intercept += err;
        for (std::size_t k = rows.row_start[i]; k < rows.row_start[i + 1]; ++k) {
            grad_weights[rows.col[k]] += err * rows.val[k];
        }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (double& g : grad_weights) g *= inv_n;
    grad_intercept *= inv_n;
}

} // namespace

double logistic_loss(std::span<const double> weights, double intercept,
                     const LabeledDataset& data, double l2) {
    if (data.size() == 0) throw DataError("logistic_loss on an empty dataset");
    const SparseRows rows(data);
    return loss_impl(rows, data.y, weights, intercept, l2);
}

void logistic_gradient(std::span<const double> weights, double intercept,
                       const LabeledDataset& data, double l2,
                       std::span<double> grad_weights, double& grad_intercept) {
    if (data.size() == 0) throw DataError("logistic_gradient on an empty dataset");
    const SparseRows rows(data);
    data_gradient_impl(rows, data.y, weights, intercept, grad_weights, grad_intercept);
    for (std::size_t j = 0; j < grad_weights.size(); ++j) {
        grad_weights[j] += l2 * weights[j];
    }
}

LogisticModel train_logistic(const LabeledDataset& train, const LogisticConfig& config,
                             std::uint64_t seed) {
    if (train.count(0) == 0 || train.count(1) == 0) {
        throw DataError("train_logistic requires both classes to be present");
    }
    if (config.learning_rate <= 0) throw ConfigError("learning_rate must be positive");
    if (config.l2 < 0) throw ConfigError("l2 must be non-negative");

    const SparseRows rows(train);
    const std::size_t p = rows.feature_count;

    LogisticModel model;
    model.config = config;
    model.seed = seed;
    model.weights.assign(p, 0.0);
    model.intercept = 0;

    double loss = loss_impl(rows, train.y, model.weights, model.intercept, config.l2);
    if (!std::isfinite(loss)) {
        throw DataError("logistic training: non-finite loss; check the inputs and use a "
                        "smaller learning_rate");
    }

    std::vector<double> grad(p, 0.0);
    std::vector<double> next(p, 0.0);
    const double lr = config.learning_rate;
    const double decay = 1.0 / (1.0 + lr * config.l2);
    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        double grad_b = 0;
        data_gradient_impl(rows, train.y, model.weights, model.intercept, grad, grad_b);
        // Exact proximal step for the L2 term; identical to plain gradient
        // descent to first order in lr but stable for any l2.
        for (std::size_t j = 0; j < p; ++j) {
            next[j] = (model.weights[j] - lr * grad[j]) * decay;
        }
        const double next_b = model.intercept - lr * grad_b;
        const double next_loss = loss_impl(rows, train.y, next, next_b, config.l2);
        if (!std::isfinite(next_loss)) {
            throw DataError("logistic training diverged (non-finite loss); use a smaller "
                            "learning_rate");
        }
        if (next_loss > loss) break; // reject the step; improvement < tolerance
        model.weights.swap(next);
        model.intercept = next_b;
        model.epochs = epoch;
        const double improvement = loss - next_loss;
        loss = next_loss;
        if (improvement < config.tolerance) break;
    }
    model.final_loss = loss;
    return model;
}

double predict_logistic(const LogisticModel& model, const FeatureVector& vec) {
    if (vec.size() != model.weights.size()) {
        throw DataError("predict_logistic: vector does not conform to the model schema");
    }
    double z = model.intercept;
    for (std::size_t j = 0; j < vec.size(); ++j) z += model.weights[j] * vec[j];
    return std::clamp(sigmoid(z), 1e-15, 1.0 - 1e-15);
}

CoefficientRanking top_coefficients(const LogisticModel& model, const FeatureSchema& schema,
                                    std::size_t k) {
    if (model.weights.size() != schema.size()) {
        throw DataError("top_coefficients: model does not match schema");
    }
    std::vector<std::size_t> order(model.weights.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return model.weights[a] > model.weights[b];
    });
    const std::size_t take = std::min(k, order.size());
    CoefficientRanking ranking;
    for (std::size_t i = 0; i < take; ++i) {
        ranking.top_positive.emplace_back(schema.names[order[i]], model.weights[order[i]]);
    }
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = order[order.size() - 1 - i];
        ranking.top_negative.emplace_back(schema.names[j], model.weights[j]);
    }
    return ranking;
}

} // namespace mobility

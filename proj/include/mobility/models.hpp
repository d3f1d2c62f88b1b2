#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mobility/dataset.hpp"
#include "mobility/features.hpp"

namespace mobility {

// --- logistic regression ---

struct LogisticConfig {
    double learning_rate = 0.1;
    double l2 = 1e-4;
    int max_epochs = 500;
    double tolerance = 1e-6;
};

struct LogisticModel {
    std::vector<double> weights;
    double intercept = 0;
    LogisticConfig config;
    std::uint64_t seed = 0; // recorded for provenance; initialisation is all-zeros
    int epochs = 0;
    double final_loss = 0;
};

/// Mean negative log-likelihood plus (l2/2)*||w||^2 (intercept unpenalised).
double logistic_loss(std::span<const double> weights, double intercept,
                     const LabeledDataset& data, double l2);

/// Analytic gradient of logistic_loss.
void logistic_gradient(std::span<const double> weights, double intercept,
                       const LabeledDataset& data, double l2,
                       std::span<double> grad_weights, double& grad_intercept);

/// Full-batch gradient descent from zero weights. The L2 term is applied as
/// the exact proximal (weight-decay) step so very large l2 stays stable.
/// Stops at max_epochs or when the loss improvement falls below tolerance;
/// an epoch that would increase the loss is rejected and training stops.
/// Throws DataError on a non-finite loss (advice: lower the learning rate)
/// or when a class is absent.
LogisticModel train_logistic(const LabeledDataset& train, const LogisticConfig& config = {},
                             std::uint64_t seed = 0);

/// Probability of Member: sigmoid(w.x + b), clamped into the open interval.
double predict_logistic(const LogisticModel& model, const FeatureVector& vec);

struct CoefficientRanking {
    // Both lists are ordered by significance: most positive first / most
    // negative first. With k >= feature count they are full sorted lists.
    std::vector<std::pair<std::string, double>> top_positive;
    std::vector<std::pair<std::string, double>> top_negative;
};

CoefficientRanking top_coefficients(const LogisticModel& model, const FeatureSchema& schema,
                                    std::size_t k);

// --- random forest ---

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0;
    int left = -1;
    int right = -1;
    std::int64_t count_casual = 0; // bootstrap sample counts reaching the node
    std::int64_t count_member = 0;
    double gini = 0;
    double prob_member = 0;

    bool is_leaf() const { return feature < 0; }
    std::int64_t count() const { return count_casual + count_member; }
};

struct DecisionTree {
    std::vector<TreeNode> nodes; // nodes[0] is the root

    const TreeNode& leaf_for(const FeatureVector& vec) const;
};

struct ForestHyperparams {
    int tree_count = 100;
    int max_depth = 16;        // -1 = unlimited
    int min_samples_leaf = 1;
    int max_features = 0;      // 0 = floor(sqrt(p)), min 1
    int threads = 0;           // 0 = hardware concurrency

    bool operator==(const ForestHyperparams&) const = default;
};

struct ForestModel {
    std::vector<DecisionTree> trees;
    ForestHyperparams params;
    std::uint64_t master_seed = 0;
    std::size_t feature_count = 0;
};

/// Each tree trains on its own bootstrap sample (n draws with replacement)
/// with max_features random split candidates per node; splits maximise Gini
/// impurity decrease and must decrease it strictly. Per-tree seeds derive
/// from (seed, tree index), so any thread count produces the same forest.
ForestModel train_forest(const LabeledDataset& train, const ForestHyperparams& params = {},
                         std::uint64_t seed = 0);

/// Fraction of trees whose leaf majority class is Member. A leaf tied 50/50
/// votes Member, and an exact 0.5 forest probability classifies as Member.
double predict_forest(const ForestModel& model, const FeatureVector& vec);

/// Mean decrease in impurity: every split contributes
/// (node sample fraction) * (impurity decrease) to its feature, averaged over
/// trees and normalised to sum to 1. A forest with no splits at all returns
/// all zeros.
std::vector<double> feature_importance(const ForestModel& model);

struct GridSearchEntry {
    ForestHyperparams params;
    double validation_macro_f1 = 0;
};

struct GridSearchResult {
    std::size_t best_index = 0;
    ForestHyperparams best;
    std::vector<GridSearchEntry> entries;
};

/// Holds out 20% of `train` as a validation split and picks the
/// configuration with the best validation macro F1; ties keep the first
/// entry in grid order.
GridSearchResult grid_search(const LabeledDataset& train,
                             std::span<const ForestHyperparams> grid, std::uint64_t seed);

std::vector<ForestHyperparams> default_forest_grid();

// --- common classifier interface ---

using Classifier = std::variant<LogisticModel, ForestModel>;

double predict_proba(const Classifier& model, const FeatureVector& vec);
bool predict_member(const Classifier& model, const FeatureVector& vec); // proba >= 0.5

/// Versioned JSON document carrying the model, its hyperparameters, seed and
/// the feature schema it was trained against.
std::string model_to_json(const Classifier& model, const FeatureSchema& schema);
std::pair<Classifier, FeatureSchema> model_from_json(const std::string& text);

} // namespace mobility

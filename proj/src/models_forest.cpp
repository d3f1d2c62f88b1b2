#include <algorithm>
#include <cmath>
#include <thread>

#include "mobility/error.hpp"
#include "mobility/eval.hpp"
#include "mobility/models.hpp"
#include "mobility/rng.hpp"
#include "mobility/sampling.hpp"

namespace mobility {

namespace {

double gini_of(std::int64_t c0, std::int64_t c1) {
    const double n = static_cast<double>(c0 + c1);
    if (n == 0) return 0;
    const double p0 = static_cast<double>(c0) / n;
    const double p1 = static_cast<double>(c1) / n;
    return 1.0 - p0 * p0 - p1 * p1;
}

struct BestSplit {
    double gain = 0;
    int feature = -1;
    double threshold = 0;
};

struct TreeBuilder {
    const LabeledDataset& data;
    const ForestHyperparams& hp;
    std::size_t p;
    std::size_t mtry;
    SplitMix64 rng;
    std::vector<std::size_t> feature_pool; // permuted in place to draw candidates
    std::vector<std::pair<double, int>> scratch;

    TreeBuilder(const LabeledDataset& d, const ForestHyperparams& h, std::uint64_t seed)
        : data(d), hp(h), p(d.x.empty() ? 0 : d.x[0].size()),
          mtry(h.max_features > 0 ? static_cast<std::size_t>(h.max_features)
                                  : std::max<std::size_t>(
                                        1, static_cast<std::size_t>(std::sqrt(
                                               static_cast<double>(d.x[0].size()))))),
          rng(seed), feature_pool(p) {
        for (std::size_t i = 0; i < p; ++i) feature_pool[i] = i;
        mtry = std::min(mtry, p);
    }

    // Best threshold on one feature, or gain 0 when no admissible split
    // improves impurity.
    void consider_feature(std::size_t feature, const std::vector<std::size_t>& indices,
                          std::int64_t c1_total, double node_gini, BestSplit& best) {
        const auto n = static_cast<std::int64_t>(indices.size());
        const std::int64_t min_leaf = hp.min_samples_leaf;

        bool binary = true;
        for (std::size_t i : indices) {
            const double v = data.x[i][feature];
            if (v != 0.0 && v != 1.0) {
                binary = false;
                break;
            }
        }
        const auto evaluate = [&](std::int64_t n_left, std::int64_t c1_left, double threshold) {
            const std::int64_t n_right = n - n_left;
            if (n_left < min_leaf || n_right < min_leaf) return;
            const double g_left = gini_of(n_left - c1_left, c1_left);
            const double g_right = gini_of(n_right - (c1_total - c1_left), c1_total - c1_left);
            const double gain = node_gini -
                                (static_cast<double>(n_left) / static_cast<double>(n)) * g_left -
                                (static_cast<double>(n_right) / static_cast<double>(n)) * g_right;
            if (gain > best.gain) {
                best = {gain, static_cast<int>(feature), threshold};
            }
        };

        if (binary) {
            std::int64_t n_zero = 0, c1_zero = 0;
            for (std::size_t i : indices) {
                if (data.x[i][feature] == 0.0) {
                    ++n_zero;
                    c1_zero += data.y[i];
                }
            }
            if (n_zero == 0 || n_zero == n) return; // constant on this node
            evaluate(n_zero, c1_zero, 0.5);
            return;
        }

        scratch.clear();
        scratch.reserve(indices.size());
        for (std::size_t i : indices) scratch.emplace_back(data.x[i][feature], data.y[i]);
        std::sort(scratch.begin(), scratch.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::int64_t c1_left = 0;
        for (std::int64_t k = 1; k < n; ++k) {
            c1_left += scratch[k - 1].second;
            if (scratch[k].first > scratch[k - 1].first) {
                evaluate(k, c1_left, 0.5 * (scratch[k - 1].first + scratch[k].first));
            }
        }
    }

    DecisionTree build() {
        const std::size_t n = data.size();
        std::vector<std::size_t> root_indices(n);
        for (std::size_t i = 0; i < n; ++i) {
            root_indices[i] = static_cast<std::size_t>(bounded(rng, n)); // bootstrap
        }

        DecisionTree tree;
        struct Work {
            std::vector<std::size_t> indices;
            int depth;
            int slot;
        };
        std::vector<Work> stack;
        tree.nodes.emplace_back();
        stack.push_back({std::move(root_indices), 0, 0});

        while (!stack.empty()) {
            Work work = std::move(stack.back());
            stack.pop_back();

            std::int64_t c1 = 0;
            for (std::size_t i : work.indices) c1 += data.y[i];
            const auto node_n = static_cast<std::int64_t>(work.indices.size());
            const std::int64_t c0 = node_n - c1;

            TreeNode node;
            node.count_casual = c0;
            node.count_member = c1;
            node.gini = gini_of(c0, c1);
            node.prob_member = static_cast<double>(c1) / static_cast<double>(node_n);

            const bool pure = (c0 == 0 || c1 == 0);
            const bool depth_capped = hp.max_depth >= 0 && work.depth >= hp.max_depth;
            const bool too_small = node_n < 2 * static_cast<std::int64_t>(hp.min_samples_leaf);

            BestSplit best;
            if (!pure && !depth_capped && !too_small) {
                // Draw mtry distinct candidate features (partial Fisher-Yates).
                for (std::size_t i = 0; i < mtry; ++i) {
                    const std::size_t j =
                        i + static_cast<std::size_t>(bounded(rng, p - i));
                    std::swap(feature_pool[i], feature_pool[j]);
                }
                for (std::size_t i = 0; i < mtry; ++i) {
                    consider_feature(feature_pool[i], work.indices, c1, node.gini, best);
                }
            }

            if (best.feature < 0 || best.gain <= 0.0) {
                tree.nodes[work.slot] = node; // leaf
                continue;
            }

            std::vector<std::size_t> left, right;
            for (std::size_t i : work.indices) {
                (data.x[i][static_cast<std::size_t>(best.feature)] <= best.threshold ? left
                                                                                     : right)
                    .push_back(i);
            }
            node.feature = best.feature;
            node.threshold = best.threshold;
            node.left = static_cast<int>(tree.nodes.size());
            node.right = node.left + 1;
            tree.nodes[work.slot] = node;
            tree.nodes.emplace_back();
            tree.nodes.emplace_back();
            // Right first so the left child is processed (and numbered) depth-first.
            stack.push_back({std::move(right), work.depth + 1, node.right});
            stack.push_back({std::move(left), work.depth + 1, node.left});
        }
        return tree;
    }
};

} // namespace

const TreeNode& DecisionTree::leaf_for(const FeatureVector& vec) const {
    const TreeNode* node = &nodes[0];
    while (!node->is_leaf()) {
        node = vec[static_cast<std::size_t>(node->feature)] <= node->threshold
                   ? &nodes[static_cast<std::size_t>(node->left)]
                   : &nodes[static_cast<std::size_t>(node->right)];
    }
    return *node;
}

ForestModel train_forest(const LabeledDataset& train, const ForestHyperparams& params,
                         std::uint64_t seed) {
    if (train.size() == 0) throw DataError("train_forest on an empty dataset");
    if (params.tree_count < 1) throw ConfigError("tree_count must be at least 1");
    if (params.min_samples_leaf < 1) throw ConfigError("min_samples_leaf must be at least 1");

    ForestModel model;
    model.params = params;
    model.master_seed = seed;
    model.feature_count = train.x[0].size();
    model.trees.resize(static_cast<std::size_t>(params.tree_count));

    unsigned thread_count = params.threads > 0 ? static_cast<unsigned>(params.threads)
                                               : std::thread::hardware_concurrency();
    if (thread_count == 0) thread_count = 1;
    thread_count = std::min<unsigned>(thread_count, static_cast<unsigned>(params.tree_count));

    const auto train_range = [&](unsigned worker) {
        for (std::size_t t = worker; t < model.trees.size(); t += thread_count) {
            TreeBuilder builder(train, params, derive_seed(seed, t));
            model.trees[t] = builder.build();
        }
    };
    if (thread_count == 1) {
        train_range(0);
    } else {
        std::vector<std::thread> workers;
        workers.reserve(thread_count);
        for (unsigned w = 0; w < thread_count; ++w) workers.emplace_back(train_range, w);
        for (std::thread& w : workers) w.join();
    }
    return model;
}

double predict_forest(const ForestModel& model, const FeatureVector& vec) {
    if (vec.size() != model.feature_count) {
        throw DataError("predict_forest: vector does not conform to the model schema");
    }
    std::size_t member_votes = 0;
    for (const DecisionTree& tree : model.trees) {
        if (tree.leaf_for(vec).prob_member >= 0.5) ++member_votes;
    }
    return static_cast<double>(member_votes) / static_cast<double>(model.trees.size());
}

std::vector<double> feature_importance(const ForestModel& model) {
    std::vector<double> importance(model.feature_count, 0.0);
    for (const DecisionTree& tree : model.trees) {
        const double root_n = static_cast<double>(tree.nodes[0].count());
        for (const TreeNode& node : tree.nodes) {
            if (node.is_leaf()) continue;
            const TreeNode& l = tree.nodes[static_cast<std::size_t>(node.left)];
            const TreeNode& r = tree.nodes[static_cast<std::size_t>(node.right)];
            const double contribution =
                (static_cast<double>(node.count()) * node.gini -
                 static_cast<double>(l.count()) * l.gini -
                 static_cast<double>(r.count()) * r.gini) /
                root_n;
            importance[static_cast<std::size_t>(node.feature)] += contribution;
        }
    }
    for (double& v : importance) v /= static_cast<double>(model.trees.size());
    double total = 0;
    for (double v : importance) total += v;
    if (total > 0) {
        for (double& v : importance) v /= total;
    }
    return importance;
}

GridSearchResult grid_search(const LabeledDataset& train,
                             std::span<const ForestHyperparams> grid, std::uint64_t seed) {
    if (grid.empty()) throw ConfigError("grid_search: empty hyperparameter grid");
    const SplitResult holdout = split(train, 0.8, derive_seed(seed, 0));
    const std::uint64_t forest_seed = derive_seed(seed, 1);

    std::vector<int> labels(holdout.test.y.begin(), holdout.test.y.end());
    GridSearchResult result;
    result.entries.reserve(grid.size());
    for (const ForestHyperparams& params : grid) {
        const ForestModel model = train_forest(holdout.train, params, forest_seed);
        std::vector<int> predictions;
        predictions.reserve(holdout.test.size());
        for (const FeatureVector& vec : holdout.test.x) {
            predictions.push_back(predict_forest(model, vec) >= 0.5 ? 1 : 0);
        }
        const MetricsReport report = metrics(confusion(predictions, labels));
        const double macro_f1 = 0.5 * (report.casual.f1 + report.member.f1);
        result.entries.push_back({params, macro_f1});
    }
    result.best_index = 0;
    for (std::size_t i = 1; i < result.entries.size(); ++i) {
        if (result.entries[i].validation_macro_f1 >
            result.entries[result.best_index].validation_macro_f1) {
            result.best_index = i;
        }
    }
    result.best = result.entries[result.best_index].params;
    return result;
}

std::vector<ForestHyperparams> default_forest_grid() {
    std::vector<ForestHyperparams> grid;
    for (int trees : {100, 200}) {
        for (int depth : {8, 16, -1}) {
            for (int min_leaf : {1, 5}) {
                ForestHyperparams hp;
                hp.tree_count = trees;
                hp.max_depth = depth;
                hp.min_samples_leaf = min_leaf;
                grid.push_back(hp);
            }
        }
    }
    return grid;
}

} // namespace mobility

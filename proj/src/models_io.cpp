#include "json.hpp"

#include "mobility/error.hpp"
#include "mobility/models.hpp"

namespace mobility {

double predict_proba(const Classifier& model, const FeatureVector& vec) {
    return std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LogisticModel>) {
                return predict_logistic(m, vec);
            } else {
                return predict_forest(m, vec);
            }
        },
        model);
}

bool predict_member(const Classifier& model, const FeatureVector& vec) {
    return predict_proba(model, vec) >= 0.5;
}

namespace {

using nlohmann::json;

// threads is execution configuration, not model content; keeping it out of
// the document makes serialised forests identical across thread counts.
json hyperparams_to_json(const ForestHyperparams& hp) {
    return {{"tree_count", hp.tree_count},
            {"max_depth", hp.max_depth},
            {"min_samples_leaf", hp.min_samples_leaf},
            {"max_features", hp.max_features}};
}

ForestHyperparams hyperparams_from_json(const json& j) {
    ForestHyperparams hp;
    hp.tree_count = j.at("tree_count").get<int>();
    hp.max_depth = j.at("max_depth").get<int>();
    hp.min_samples_leaf = j.at("min_samples_leaf").get<int>();
    hp.max_features = j.at("max_features").get<int>();
    return hp;
}

} // namespace

std::string model_to_json(const Classifier& model, const FeatureSchema& schema) {
    json doc;
    doc["format_version"] = 1;
    doc["schema"] = json::parse(schema.to_json());
    if (const auto* logistic = std::get_if<LogisticModel>(&model)) {
        doc["model_type"] = "logistic";
        doc["logistic"] = {{"weights", logistic->weights},
                           {"intercept", logistic->intercept},
                           {"config",
                            {{"learning_rate", logistic->config.learning_rate},
                             {"l2", logistic->config.l2},
                             {"max_epochs", logistic->config.max_epochs},
                             {"tolerance", logistic->config.tolerance}}},
                           {"seed", logistic->seed},
                           {"epochs", logistic->epochs},
                           {"final_loss", logistic->final_loss}};
    } else {
        const auto& forest = std::get<ForestModel>(model);
        doc["model_type"] = "forest";
        json trees = json::array();
        for (const DecisionTree& tree : forest.trees) {
            json nodes = json::array();
            for (const TreeNode& n : tree.nodes) {
                nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right,
                                             n.count_casual, n.count_member, n.gini,
                                             n.prob_member}));
            }
            trees.push_back(std::move(nodes));
        }
        doc["forest"] = {{"hyperparams", hyperparams_to_json(forest.params)},
                         {"master_seed", forest.master_seed},
                         {"feature_count", forest.feature_count},
                         {"trees", std::move(trees)}};
    }
    return doc.dump();
}

std::pair<Classifier, FeatureSchema> model_from_json(const std::string& text) {
    try {
        const json doc = json::parse(text);
        if (doc.value("format_version", 0) != 1) {
            throw ConfigError("model file: unsupported format_version");
        }
        FeatureSchema schema = FeatureSchema::from_json(doc.at("schema").dump());
        const std::string type = doc.at("model_type").get<std::string>();
        if (type == "logistic") {
            const json& j = doc.at("logistic");
            LogisticModel model;
            model.weights = j.at("weights").get<std::vector<double>>();
            model.intercept = j.at("intercept").get<double>();
            model.config.learning_rate = j.at("config").at("learning_rate").get<double>();
            model.config.l2 = j.at("config").at("l2").get<double>();
            model.config.max_epochs = j.at("config").at("max_epochs").get<int>();
            model.config.tolerance = j.at("config").at("tolerance").get<double>();
            model.seed = j.at("seed").get<std::uint64_t>();
            model.epochs = j.at("epochs").get<int>();
            model.final_loss = j.at("final_loss").get<double>();
            if (model.weights.size() != schema.size()) {
                throw ConfigError("model file: weight count does not match schema");
            }
            return {Classifier(std::move(model)), std::move(schema)};
        }
        if (type == "forest") {
            const json& j = doc.at("forest");
            ForestModel model;
            model.params = hyperparams_from_json(j.at("hyperparams"));
            model.master_seed = j.at("master_seed").get<std::uint64_t>();
            model.feature_count = j.at("feature_count").get<std::size_t>();
            for (const json& tree_json : j.at("trees")) {
                DecisionTree tree;
                for (const json& n : tree_json) {
                    TreeNode node;
                    node.feature = n.at(0).get<int>();
                    node.threshold = n.at(1).get<double>();
                    node.left = n.at(2).get<int>();
                    node.right = n.at(3).get<int>();
                    node.count_casual = n.at(4).get<std::int64_t>();
                    node.count_member = n.at(5).get<std::int64_t>();
                    node.gini = n.at(6).get<double>();
                    node.prob_member = n.at(7).get<double>();
                    tree.nodes.push_back(node);
                }
                model.trees.push_back(std::move(tree));
            }
            if (model.feature_count != schema.size()) {
                throw ConfigError("model file: feature count does not match schema");
            }
            return {Classifier(std::move(model)), std::move(schema)};
        }
        throw ConfigError("model file: unknown model_type: " + type);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid model JSON: ") + e.what());
    }
}

} // namespace mobility

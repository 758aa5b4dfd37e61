#include <json.hpp>

#include "txadv/csv.hpp"
#include "txadv/errors.hpp"
#include "txadv/models.hpp"
#include "txadv/sha256.hpp"

namespace txadv {

namespace {

using nlohmann::json;

json tree_to_json(const DecisionTreeModel& tree) {
    json nodes = json::array();
    for (const auto& n : tree.nodes()) {
        json jn;
        jn["feature"] = n.feature;
        if (n.feature >= 0) {
            jn["threshold"] = n.threshold;
            jn["left"] = n.left;
            jn["right"] = n.right;
        } else {
            jn["probs"] = n.probs;
        }
        nodes.push_back(std::move(jn));
    }
    json j;
    j["nodes"] = std::move(nodes);
    j["n_features"] = tree.n_features();
    j["n_classes"] = tree.n_classes();
    j["max_depth"] = tree.params().max_depth;
    j["min_samples_leaf"] = tree.params().min_samples_leaf;
    return j;
}

DecisionTreeModel tree_from_json(const json& j) {
    std::vector<DecisionTreeModel::Node> nodes;
    for (const auto& jn : j.at("nodes")) {
        DecisionTreeModel::Node n;
        n.feature = jn.at("feature").get<int>();
        if (n.feature >= 0) {
            n.threshold = jn.at("threshold").get<double>();
            n.left = jn.at("left").get<int>();
            n.right = jn.at("right").get<int>();
        } else {
            n.probs = jn.at("probs").get<std::vector<double>>();
        }
        nodes.push_back(std::move(n));
    }
    DtParams params;
    params.max_depth = j.at("max_depth").get<int>();
    params.min_samples_leaf = j.at("min_samples_leaf").get<int>();
    return DecisionTreeModel::from_parts(std::move(nodes), j.at("n_features").get<std::size_t>(),
                                         j.at("n_classes").get<std::size_t>(), params);
}

}  // namespace

std::string matrix_digest(const Matrix& m, const std::vector<int>& labels) {
    Sha256 h;
    h.update(std::to_string(m.rows) + "x" + std::to_string(m.cols) + ";");
    for (double v : m.data) {
        h.update(format_double(v));
        h.update(",");
    }
    h.update(";");
    for (int v : labels) {
        h.update(std::to_string(v));
        h.update(",");
    }
    return h.hex_digest();
}

std::string model_to_json(const TrainedModel& model) {
    json j;
    j["format"] = "txadv-model";
    j["version"] = 1;
    j["kind"] = model_kind_name(model.kind());

    switch (model.kind()) {
        case ModelKind::DecisionTree: {
            const auto& tree = dynamic_cast<const DecisionTreeModel&>(model);
            j["tree"] = tree_to_json(tree);
            break;
        }
        case ModelKind::RandomForest: {
            const auto& forest = dynamic_cast<const RandomForestModel&>(model);
            j["n_features"] = forest.n_features();
            j["n_classes"] = forest.n_classes();
            j["seed"] = forest.params().seed;
            j["bootstrap"] = forest.params().bootstrap;
            j["features_per_split"] = forest.params().features_per_split;
            json trees = json::array();
            for (const auto& t : forest.trees()) trees.push_back(tree_to_json(t));
            j["trees"] = std::move(trees);
            break;
        }
        case ModelKind::Knn: {
            const auto& knn = dynamic_cast<const KnnModel&>(model);
            j["k"] = knn.params().k;
            j["n_features"] = knn.n_features();
            j["n_classes"] = knn.n_classes();
            // Reference to the training data, not the data itself.
            j["data"] = {{"n_rows", knn.train_data().rows},
                         {"digest", matrix_digest(knn.train_data(), knn.train_labels())}};
            break;
        }
        case ModelKind::Surrogate: {
            const auto& s = dynamic_cast<const SoftmaxSurrogate&>(model);
            j["n_features"] = s.n_features();
            j["n_classes"] = s.n_classes();
            j["weights"] = s.weights().data;
            j["bias"] = s.bias();
            j["learning_rate"] = s.params().learning_rate;
            j["epochs"] = s.params().epochs;
            j["l2"] = s.params().l2;
            j["seed"] = s.params().seed;
            break;
        }
    }
    return j.dump(2);
}

std::unique_ptr<TrainedModel> model_from_json(const std::string& text, const Matrix* knn_data,
                                              const std::vector<int>* knn_labels) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("model JSON parse error: ") + e.what());
    }
    if (j.value("format", "") != "txadv-model") throw ConfigError("not a txadv model document");
    if (j.value("version", 0) != 1) throw ConfigError("unsupported model document version");

    const ModelKind kind = model_kind_from_name(j.at("kind").get<std::string>());
    switch (kind) {
        case ModelKind::DecisionTree:
            return std::make_unique<DecisionTreeModel>(tree_from_json(j.at("tree")));
        case ModelKind::RandomForest: {
            std::vector<DecisionTreeModel> trees;
            for (const auto& jt : j.at("trees")) trees.push_back(tree_from_json(jt));
            RfParams params;
            params.n_trees = static_cast<int>(trees.size());
            params.seed = j.at("seed").get<std::uint64_t>();
            params.bootstrap = j.at("bootstrap").get<bool>();
            params.features_per_split = j.at("features_per_split").get<int>();
            if (!trees.empty()) params.tree = trees.front().params();
            return std::make_unique<RandomForestModel>(
                RandomForestModel::from_parts(std::move(trees), j.at("n_features").get<std::size_t>(),
                                              j.at("n_classes").get<std::size_t>(), params));
        }
        case ModelKind::Knn: {
            if (knn_data == nullptr || knn_labels == nullptr)
                throw ConfigError("KNN document stores a data reference; supply the training data");
            const auto expected = j.at("data").at("digest").get<std::string>();
            if (matrix_digest(*knn_data, *knn_labels) != expected)
                throw ConfigError("supplied training data does not match the stored digest");
            KnnParams params;
            params.k = j.at("k").get<int>();
            return std::make_unique<KnnModel>(KnnModel::from_parts(
                *knn_data, *knn_labels, j.at("n_classes").get<std::size_t>(), params));
        }
        case ModelKind::Surrogate: {
            Matrix w(j.at("n_classes").get<std::size_t>(), j.at("n_features").get<std::size_t>());
            w.data = j.at("weights").get<std::vector<double>>();
            if (w.data.size() != w.rows * w.cols)
                throw ConfigError("surrogate weight vector has the wrong size");
            SurrogateParams params;
            params.learning_rate = j.at("learning_rate").get<double>();
            params.epochs = j.at("epochs").get<int>();
            params.l2 = j.at("l2").get<double>();
            params.seed = j.at("seed").get<std::uint64_t>();
            return std::make_unique<SoftmaxSurrogate>(SoftmaxSurrogate::from_parts(
                std::move(w), j.at("bias").get<std::vector<double>>(), params));
        }
    }
    throw ConfigError("unknown model kind");
}

}  // namespace txadv

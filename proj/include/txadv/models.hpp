#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "txadv/matrix.hpp"

namespace txadv {

struct DtParams {
    int max_depth = 16;
    int min_samples_leaf = 2;
};

struct RfParams {
    int n_trees = 100;
    // 0 selects ceil(sqrt(n_features)); values >= n_features disable
    // subsampling (and skip the RNG entirely, so a 1-tree forest without
    // bootstrap reproduces a plain decision tree).
    int features_per_split = 0;
    bool bootstrap = true;
    std::uint64_t seed = 0;
    // Trees fit in parallel when > 1. Per-tree seeds are seed + index, so
    // the forest is identical for any thread count.
    int threads = 1;
    DtParams tree;
};

struct KnnParams {
    int k = 5;
};

struct SurrogateParams {
    double learning_rate = 0.1;
    int epochs = 200;
    double l2 = 1e-4;
    std::uint64_t seed = 0;
};

enum class ModelKind { DecisionTree, RandomForest, Knn, Surrogate };

std::string model_kind_name(ModelKind k);
ModelKind model_kind_from_name(const std::string& name);

struct ModelSpec {
    ModelKind kind = ModelKind::DecisionTree;
    DtParams dt;
    RfParams rf;
    KnnParams knn;
    SurrogateParams surrogate;
};

class TrainedModel {
public:
    virtual ~TrainedModel() = default;
    virtual ModelKind kind() const = 0;
    virtual std::size_t n_features() const = 0;
    virtual std::size_t n_classes() const = 0;
    // One probability row per input row; rows sum to 1 +- 1e-9.
    virtual Matrix predict_proba(const Matrix& rows) const = 0;
    // Argmax of predict_proba; ties broken by smallest class id.
    std::vector<int> predict(const Matrix& rows) const;
};

// -- CART decision tree -----------------------------------------------------

class DecisionTreeModel final : public TrainedModel {
public:
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        std::vector<double> probs;  // leaves only
    };

    static DecisionTreeModel fit(const Matrix& x, const std::vector<int>& y,
                                 std::size_t n_classes, const DtParams& params);
    // Variant used by random forests: candidate features per split are
    // drawn from *rng when features_per_split < n_features.
    static DecisionTreeModel fit_subsampled(const Matrix& x, const std::vector<int>& y,
                                            std::size_t n_classes, const DtParams& params,
                                            int features_per_split, std::uint64_t seed);

    ModelKind kind() const override { return ModelKind::DecisionTree; }
    std::size_t n_features() const override { return n_features_; }
    std::size_t n_classes() const override { return n_classes_; }
    Matrix predict_proba(const Matrix& rows) const override;

    const std::vector<Node>& nodes() const { return nodes_; }
    int depth() const;
    const DtParams& params() const { return params_; }

    // Used by serialization.
    static DecisionTreeModel from_parts(std::vector<Node> nodes, std::size_t n_features,
                                        std::size_t n_classes, const DtParams& params);

private:
    std::vector<Node> nodes_;
    std::size_t n_features_ = 0;
    std::size_t n_classes_ = 0;
    DtParams params_;
};

// -- Random forest ------------------------------------------------------------

class RandomForestModel final : public TrainedModel {
public:
    static RandomForestModel fit(const Matrix& x, const std::vector<int>& y,
                                 std::size_t n_classes, const RfParams& params);

    ModelKind kind() const override { return ModelKind::RandomForest; }
    std::size_t n_features() const override { return n_features_; }
    std::size_t n_classes() const override { return n_classes_; }
    Matrix predict_proba(const Matrix& rows) const override;

    const std::vector<DecisionTreeModel>& trees() const { return trees_; }
    const RfParams& params() const { return params_; }

    static RandomForestModel from_parts(std::vector<DecisionTreeModel> trees,
                                        std::size_t n_features, std::size_t n_classes,
                                        const RfParams& params);

private:
    std::vector<DecisionTreeModel> trees_;
    std::size_t n_features_ = 0;
    std::size_t n_classes_ = 0;
    RfParams params_;
};

// -- K-nearest neighbors ------------------------------------------------------

class KnnModel final : public TrainedModel {
public:
    static KnnModel fit(const Matrix& x, const std::vector<int>& y, std::size_t n_classes,
                        const KnnParams& params);

    ModelKind kind() const override { return ModelKind::Knn; }
    std::size_t n_features() const override { return train_.cols; }
    std::size_t n_classes() const override { return n_classes_; }
    // Vote over every neighbor whose distance does not exceed the k-th
    // smallest, so predictions are invariant under permutation of the
    // stored training rows.
    Matrix predict_proba(const Matrix& rows) const override;

    const Matrix& train_data() const { return train_; }
    const std::vector<int>& train_labels() const { return labels_; }
    const KnnParams& params() const { return params_; }

    static KnnModel from_parts(Matrix train, std::vector<int> labels, std::size_t n_classes,
                               const KnnParams& params);

private:
    Matrix train_;
    std::vector<int> labels_;
    std::size_t n_classes_ = 0;
    KnnParams params_;
};

// -- Differentiable softmax-regression surrogate ------------------------------
//
// Gradient source for the sign-based attack; attacks crafted on it are
// transferred to the tree and neighbor models.

class SoftmaxSurrogate final : public TrainedModel {
public:
    static SoftmaxSurrogate fit(const Matrix& x, const std::vector<int>& y,
                                std::size_t n_classes, const SurrogateParams& params);

    ModelKind kind() const override { return ModelKind::Surrogate; }
    std::size_t n_features() const override { return n_features_; }
    std::size_t n_classes() const override { return n_classes_; }
    Matrix predict_proba(const Matrix& rows) const override;

    // d(cross-entropy)/dx at (x, y): W^T (softmax(Wx+b) - onehot(y)).
    std::vector<double> input_gradient(std::span<const double> x, int y) const;
    double loss(const Matrix& x, const std::vector<int>& y) const;

    const Matrix& weights() const { return w_; }
    const std::vector<double>& bias() const { return b_; }
    const std::vector<double>& loss_history() const { return loss_history_; }
    const SurrogateParams& params() const { return params_; }

    static SoftmaxSurrogate from_parts(Matrix w, std::vector<double> b,
                                       const SurrogateParams& params);

private:
    std::vector<double> probabilities(std::span<const double> x) const;

    Matrix w_;  // n_classes x n_features
    std::vector<double> b_;
    std::size_t n_features_ = 0;
    std::size_t n_classes_ = 0;
    std::vector<double> loss_history_;
    SurrogateParams params_;
};

// -- dispatch ----------------------------------------------------------------

std::unique_ptr<TrainedModel> fit(const ModelSpec& spec, const Matrix& x,
                                  const std::vector<int>& y, std::size_t n_classes);

// Versioned JSON save/load. KNN documents carry a digest reference to the
// training data instead of the data itself; pass the matching matrix and
// labels when loading such a document.
std::string model_to_json(const TrainedModel& model);
std::unique_ptr<TrainedModel> model_from_json(const std::string& text,
                                              const Matrix* knn_data = nullptr,
                                              const std::vector<int>* knn_labels = nullptr);
std::string matrix_digest(const Matrix& m, const std::vector<int>& labels);

}  // namespace txadv

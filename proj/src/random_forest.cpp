#include <cmath>
#include <thread>

#include "txadv/errors.hpp"
#include "txadv/models.hpp"
#include "txadv/rng.hpp"

namespace txadv {

namespace {

DecisionTreeModel fit_one_tree(const Matrix& x, const std::vector<int>& y, std::size_t n_classes,
                               const RfParams& params, int per_split, int tree_index) {
    const std::uint64_t tree_seed = params.seed + static_cast<std::uint64_t>(tree_index);
    if (!params.bootstrap)
        return DecisionTreeModel::fit_subsampled(x, y, n_classes, params.tree, per_split, tree_seed);

    Rng rng(tree_seed ^ 0xb007ULL);
    std::vector<std::size_t> sample(x.rows);
    std::vector<int> sample_y(x.rows);
    bool multiple = false;
    for (std::size_t i = 0; i < x.rows; ++i) {
        sample[i] = static_cast<std::size_t>(rng.below(x.rows));
        sample_y[i] = y[sample[i]];
        if (sample_y[i] != sample_y[0]) multiple = true;
    }
    if (!multiple) {
        // Degenerate draw; force one row of another class in so the tree
        // remains trainable. Deterministic.
        for (std::size_t i = 0; i < x.rows; ++i) {
            if (y[i] != sample_y[0]) {
                sample[0] = i;
                sample_y[0] = y[i];
                break;
            }
        }
    }
    const Matrix xs = x.select_rows(sample);
    return DecisionTreeModel::fit_subsampled(xs, sample_y, n_classes, params.tree, per_split,
                                             tree_seed);
}

}  // namespace

RandomForestModel RandomForestModel::fit(const Matrix& x, const std::vector<int>& y,
                                         std::size_t n_classes, const RfParams& params) {
    if (params.n_trees < 1) throw ConfigError("random forest needs at least one tree");

    int per_split = params.features_per_split;
    if (per_split <= 0)
        per_split = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(x.cols))));

    RandomForestModel model;
    model.n_features_ = x.cols;
    model.n_classes_ = n_classes;
    model.params_ = params;
    model.trees_.resize(static_cast<std::size_t>(params.n_trees));

    // Each tree depends only on (data, tree_seed), so sharding trees
    // across threads reproduces the serial forest exactly.
    const int n_threads = std::min(params.threads, params.n_trees);
    if (n_threads <= 1) {
        for (int t = 0; t < params.n_trees; ++t)
            model.trees_[static_cast<std::size_t>(t)] =
                fit_one_tree(x, y, n_classes, params, per_split, t);
    } else {
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(n_threads));
        const int chunk = (params.n_trees + n_threads - 1) / n_threads;
        for (int w = 0; w < n_threads; ++w) {
            const int begin = w * chunk;
            const int end = std::min(params.n_trees, begin + chunk);
            if (begin >= end) break;
            workers.emplace_back([&, begin, end] {
                for (int t = begin; t < end; ++t)
                    model.trees_[static_cast<std::size_t>(t)] =
                        fit_one_tree(x, y, n_classes, params, per_split, t);
            });
        }
        for (auto& worker : workers) worker.join();
    }
    return model;
}

RandomForestModel RandomForestModel::from_parts(std::vector<DecisionTreeModel> trees,
                                                std::size_t n_features, std::size_t n_classes,
                                                const RfParams& params) {
    RandomForestModel model;
    model.trees_ = std::move(trees);
    model.n_features_ = n_features;
    model.n_classes_ = n_classes;
    model.params_ = params;
    return model;
}

Matrix RandomForestModel::predict_proba(const Matrix& rows) const {
    if (rows.rows > 0 && rows.cols != n_features_)
        throw WidthMismatchError(n_features_, rows.cols);
    Matrix out(rows.rows, n_classes_);
    for (const auto& tree : trees_) {
        const Matrix p = tree.predict_proba(rows);
        for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += p.data[i];
    }
    const double scale = 1.0 / static_cast<double>(trees_.size());
    for (double& v : out.data) v *= scale;
    return out;
}

}  // namespace txadv

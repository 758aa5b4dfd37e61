#include <algorithm>
#include <cmath>
#include <numeric>

#include "txadv/errors.hpp"
#include "txadv/models.hpp"
#include "txadv/rng.hpp"

namespace txadv {

namespace {

constexpr double kMinGain = 1e-12;

double gini(const std::vector<std::size_t>& counts, std::size_t total) {
    if (total == 0) return 0.0;
    double sum_sq = 0.0;
    for (std::size_t c : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

struct Builder {
    const Matrix& x;
    const std::vector<int>& y;
    std::size_t n_classes;
    DtParams params;
    int features_per_split;   // <= 0 or >= cols means "all features"
    Rng* rng;                 // only consulted when subsampling
    std::vector<DecisionTreeModel::Node> nodes;

    std::vector<double> leaf_probs(const std::vector<std::size_t>& rows) const {
        std::vector<double> probs(n_classes, 0.0);
        for (std::size_t r : rows) probs[static_cast<std::size_t>(y[r])] += 1.0;
        for (double& p : probs) p /= static_cast<double>(rows.size());
        return probs;
    }

    int make_leaf(const std::vector<std::size_t>& rows) {
        DecisionTreeModel::Node node;
        node.probs = leaf_probs(rows);
        nodes.push_back(std::move(node));
        return static_cast<int>(nodes.size() - 1);
    }

    std::vector<int> candidate_features() const {
        const int cols = static_cast<int>(x.cols);
        std::vector<int> all(static_cast<std::size_t>(cols));
        std::iota(all.begin(), all.end(), 0);
        if (features_per_split <= 0 || features_per_split >= cols) return all;
        // Draw without replacement, then restore index order so the
        // lowest-feature tie-break stays meaningful.
        rng->shuffle(all);
        all.resize(static_cast<std::size_t>(features_per_split));
        std::sort(all.begin(), all.end());
        return all;
    }

    SplitChoice best_split(const std::vector<std::size_t>& rows) const {
        const std::size_t n = rows.size();
        std::vector<std::size_t> total_counts(n_classes, 0);
        for (std::size_t r : rows) ++total_counts[static_cast<std::size_t>(y[r])];
        const double parent_impurity = gini(total_counts, n);

        SplitChoice best;
        if (parent_impurity <= 0.0) return best;

        std::vector<std::pair<double, int>> column(n);
        const auto min_leaf = static_cast<std::size_t>(params.min_samples_leaf);

        for (int f : candidate_features()) {
            for (std::size_t i = 0; i < n; ++i)
                column[i] = {x.at(rows[i], static_cast<std::size_t>(f)), y[rows[i]]};
            std::sort(column.begin(), column.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

            std::vector<std::size_t> left_counts(n_classes, 0);
            std::size_t n_left = 0;
            // Candidate thresholds are midpoints between consecutive
            // distinct sorted values.
            for (std::size_t i = 0; i + 1 < n; ++i) {
                ++left_counts[static_cast<std::size_t>(column[i].second)];
                ++n_left;
                if (column[i].first == column[i + 1].first) continue;
                const std::size_t n_right = n - n_left;
                if (n_left < min_leaf || n_right < min_leaf) continue;

                std::vector<std::size_t> right_counts(n_classes);
                for (std::size_t c = 0; c < n_classes; ++c)
                    right_counts[c] = total_counts[c] - left_counts[c];

                const double child =
                    (static_cast<double>(n_left) * gini(left_counts, n_left) +
                     static_cast<double>(n_right) * gini(right_counts, n_right)) /
                    static_cast<double>(n);
                const double gain = parent_impurity - child;
                const double threshold = column[i].first + 0.5 * (column[i + 1].first - column[i].first);
                // Features ascend and thresholds ascend within a feature,
                // so keeping the first best implements the lowest-feature,
                // lowest-threshold tie-break.
                if (gain > best.gain + kMinGain) best = {f, threshold, gain};
            }
        }
        return best;
    }

    int build(std::vector<std::size_t> rows, int depth) {
        const std::size_t n = rows.size();
        bool pure = true;
        for (std::size_t i = 1; i < n && pure; ++i) pure = (y[rows[i]] == y[rows[0]]);

        if (pure || depth >= params.max_depth ||
            n < 2 * static_cast<std::size_t>(params.min_samples_leaf)) {
            return make_leaf(rows);
        }
        const SplitChoice split = best_split(rows);
        if (split.feature < 0 || split.gain <= kMinGain) return make_leaf(rows);

        std::vector<std::size_t> left, right;
        for (std::size_t r : rows) {
            if (x.at(r, static_cast<std::size_t>(split.feature)) <= split.threshold)
                left.push_back(r);
            else
                right.push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        DecisionTreeModel::Node node;
        node.feature = split.feature;
        node.threshold = split.threshold;
        nodes.push_back(std::move(node));
        const int self = static_cast<int>(nodes.size() - 1);
        const int l = build(std::move(left), depth + 1);
        const int r = build(std::move(right), depth + 1);
        nodes[static_cast<std::size_t>(self)].left = l;
        nodes[static_cast<std::size_t>(self)].right = r;
        return self;
    }
};

void check_fit_inputs(const Matrix& x, const std::vector<int>& y, std::size_t n_classes) {
    if (x.rows == 0 || x.rows != y.size())
        throw LengthMismatchError("feature matrix and label vector sizes differ");
    bool multiple = false;
    for (std::size_t i = 1; i < y.size() && !multiple; ++i) multiple = (y[i] != y[0]);
    if (!multiple) throw SingleClassDatasetError("training split holds a single class");
    for (int label : y) {
        if (label < 0 || static_cast<std::size_t>(label) >= n_classes)
            throw BadLabelError("label " + std::to_string(label) + " outside [0, " +
                                std::to_string(n_classes) + ")");
    }
}

}  // namespace

std::vector<int> TrainedModel::predict(const Matrix& rows) const {
    const Matrix probs = predict_proba(rows);
    std::vector<int> out(rows.rows);
    for (std::size_t r = 0; r < rows.rows; ++r) {
        const auto row = probs.row(r);
        std::size_t best = 0;
        for (std::size_t c = 1; c < row.size(); ++c)
            if (row[c] > row[best]) best = c;  // strict: ties keep the smallest id
        out[r] = static_cast<int>(best);
    }
    return out;
}

DecisionTreeModel DecisionTreeModel::fit(const Matrix& x, const std::vector<int>& y,
                                         std::size_t n_classes, const DtParams& params) {
    return fit_subsampled(x, y, n_classes, params, 0, 0);
}

DecisionTreeModel DecisionTreeModel::fit_subsampled(const Matrix& x, const std::vector<int>& y,
                                                    std::size_t n_classes, const DtParams& params,
                                                    int features_per_split, std::uint64_t seed) {
    check_fit_inputs(x, y, n_classes);
    Rng rng(seed);
    Builder builder{x, y, n_classes, params, features_per_split, &rng, {}};
    std::vector<std::size_t> rows(x.rows);
    std::iota(rows.begin(), rows.end(), 0);
    builder.build(std::move(rows), 0);

    DecisionTreeModel model;
    model.nodes_ = std::move(builder.nodes);
    model.n_features_ = x.cols;
    model.n_classes_ = n_classes;
    model.params_ = params;
    return model;
}

DecisionTreeModel DecisionTreeModel::from_parts(std::vector<Node> nodes, std::size_t n_features,
                                                std::size_t n_classes, const DtParams& params) {
    DecisionTreeModel model;
    model.nodes_ = std::move(nodes);
    model.n_features_ = n_features;
    model.n_classes_ = n_classes;
    model.params_ = params;
    return model;
}

Matrix DecisionTreeModel::predict_proba(const Matrix& rows) const {
    if (rows.rows > 0 && rows.cols != n_features_)
        throw WidthMismatchError(n_features_, rows.cols);
    Matrix out(rows.rows, n_classes_);
    for (std::size_t r = 0; r < rows.rows; ++r) {
        std::size_t node = 0;
        while (nodes_[node].feature >= 0) {
            const auto& n = nodes_[node];
            node = static_cast<std::size_t>(
                rows.at(r, static_cast<std::size_t>(n.feature)) <= n.threshold ? n.left : n.right);
        }
        const auto& probs = nodes_[node].probs;
        for (std::size_t c = 0; c < n_classes_; ++c) out.at(r, c) = probs[c];
    }
    return out;
}

int DecisionTreeModel::depth() const {
    // Iterative depth computation over the node arena.
    std::vector<std::pair<std::size_t, int>> stack{{0, 0}};
    int depth = 0;
    while (!stack.empty()) {
        const auto [idx, d] = stack.back();
        stack.pop_back();
        depth = std::max(depth, d);
        const auto& n = nodes_[idx];
        if (n.feature >= 0) {
            stack.push_back({static_cast<std::size_t>(n.left), d + 1});
            stack.push_back({static_cast<std::size_t>(n.right), d + 1});
        }
    }
    return depth;
}

}  // namespace txadv

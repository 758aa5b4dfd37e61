#include <algorithm>
#include <cmath>

#include "txadv/errors.hpp"
#include "txadv/models.hpp"

namespace txadv {

namespace {

void softmax_inplace(std::vector<double>& logits) {
    const double m = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double& v : logits) {
        v = std::exp(v - m);
        sum += v;
    }
    for (double& v : logits) v /= sum;
}

}  // namespace

std::vector<double> SoftmaxSurrogate::probabilities(std::span<const double> x) const {
    std::vector<double> logits(n_classes_);
    for (std::size_t c = 0; c < n_classes_; ++c) {
        double z = b_[c];
        const auto w = w_.row(c);
        for (std::size_t f = 0; f < n_features_; ++f) z += w[f] * x[f];
        logits[c] = z;
    }
    softmax_inplace(logits);
    return logits;
}

double SoftmaxSurrogate::loss(const Matrix& x, const std::vector<int>& y) const {
    if (x.rows != y.size()) throw LengthMismatchError("rows and labels differ in length");
    double total = 0.0;
    for (std::size_t r = 0; r < x.rows; ++r) {
        const auto p = probabilities(x.row(r));
        total += -std::log(std::max(p[static_cast<std::size_t>(y[r])], 1e-300));
    }
    double reg = 0.0;
    for (double w : w_.data) reg += w * w;
    return total / static_cast<double>(x.rows) + 0.5 * params_.l2 * reg;
}

SoftmaxSurrogate SoftmaxSurrogate::fit(const Matrix& x, const std::vector<int>& y,
                                       std::size_t n_classes, const SurrogateParams& params) {
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

    SoftmaxSurrogate model;
    model.w_ = Matrix(n_classes, x.cols);  // zero-initialized; the problem is convex
    model.b_.assign(n_classes, 0.0);
    model.n_features_ = x.cols;
    model.n_classes_ = n_classes;
    model.params_ = params;

    const double inv_n = 1.0 / static_cast<double>(x.rows);
    double lr = params.learning_rate;
    double prev_loss = model.loss(x, y);
    model.loss_history_.push_back(prev_loss);

    Matrix grad_w(n_classes, x.cols);
    std::vector<double> grad_b(n_classes);

    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        std::fill(grad_w.data.begin(), grad_w.data.end(), 0.0);
        std::fill(grad_b.begin(), grad_b.end(), 0.0);

        for (std::size_t r = 0; r < x.rows; ++r) {
            const auto row = x.row(r);
            auto p = model.probabilities(row);
            p[static_cast<std::size_t>(y[r])] -= 1.0;
            for (std::size_t c = 0; c < n_classes; ++c) {
                const double coeff = p[c] * inv_n;
                if (coeff == 0.0) continue;
                auto wrow = grad_w.row(c);
                for (std::size_t f = 0; f < x.cols; ++f) wrow[f] += coeff * row[f];
                grad_b[c] += coeff;
            }
        }
        for (std::size_t i = 0; i < grad_w.data.size(); ++i)
            grad_w.data[i] += params.l2 * model.w_.data[i];

        // Step with halving on any loss increase, which keeps the recorded
        // loss history non-increasing for arbitrary inputs.
        const Matrix w_before = model.w_;
        const std::vector<double> b_before = model.b_;
        for (int attempt = 0; attempt < 30; ++attempt) {
            for (std::size_t i = 0; i < model.w_.data.size(); ++i)
                model.w_.data[i] = w_before.data[i] - lr * grad_w.data[i];
            for (std::size_t c = 0; c < n_classes; ++c)
                model.b_[c] = b_before[c] - lr * grad_b[c];
            const double cur = model.loss(x, y);
            if (cur <= prev_loss + 1e-12) {
                prev_loss = cur;
                break;
            }
            lr *= 0.5;
            model.w_ = w_before;
            model.b_ = b_before;
        }
        model.loss_history_.push_back(prev_loss);
    }
    return model;
}

SoftmaxSurrogate SoftmaxSurrogate::from_parts(Matrix w, std::vector<double> b,
                                              const SurrogateParams& params) {
    SoftmaxSurrogate model;
    model.n_classes_ = w.rows;
    model.n_features_ = w.cols;
    model.w_ = std::move(w);
    model.b_ = std::move(b);
    model.params_ = params;
    return model;
}

Matrix SoftmaxSurrogate::predict_proba(const Matrix& rows) const {
    if (rows.rows > 0 && rows.cols != n_features_)
        throw WidthMismatchError(n_features_, rows.cols);
    Matrix out(rows.rows, n_classes_);
    for (std::size_t r = 0; r < rows.rows; ++r) {
        const auto p = probabilities(rows.row(r));
        for (std::size_t c = 0; c < n_classes_; ++c) out.at(r, c) = p[c];
    }
    return out;
}

std::vector<double> SoftmaxSurrogate::input_gradient(std::span<const double> x, int y) const {
    if (x.size() != n_features_) throw WidthMismatchError(n_features_, x.size());
    if (y < 0 || static_cast<std::size_t>(y) >= n_classes_)
        throw BadLabelError("label " + std::to_string(y) + " outside [0, " +
                            std::to_string(n_classes_) + ")");
    auto p = probabilities(x);
    p[static_cast<std::size_t>(y)] -= 1.0;
    std::vector<double> grad(n_features_, 0.0);
    for (std::size_t c = 0; c < n_classes_; ++c) {
        if (p[c] == 0.0) continue;
        const auto w = w_.row(c);
        for (std::size_t f = 0; f < n_features_; ++f) grad[f] += p[c] * w[f];
    }
    return grad;
}

std::unique_ptr<TrainedModel> fit(const ModelSpec& spec, const Matrix& x,
                                  const std::vector<int>& y, std::size_t n_classes) {
    switch (spec.kind) {
        case ModelKind::DecisionTree:
            return std::make_unique<DecisionTreeModel>(
                DecisionTreeModel::fit(x, y, n_classes, spec.dt));
        case ModelKind::RandomForest:
            return std::make_unique<RandomForestModel>(
                RandomForestModel::fit(x, y, n_classes, spec.rf));
        case ModelKind::Knn:
            return std::make_unique<KnnModel>(KnnModel::fit(x, y, n_classes, spec.knn));
        case ModelKind::Surrogate:
            return std::make_unique<SoftmaxSurrogate>(
                SoftmaxSurrogate::fit(x, y, n_classes, spec.surrogate));
    }
    throw ConfigError("unknown model kind");
}

std::string model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::DecisionTree: return "decision_tree";
        case ModelKind::RandomForest: return "random_forest";
        case ModelKind::Knn: return "knn";
        case ModelKind::Surrogate: return "surrogate";
    }
    return "decision_tree";
}

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "decision_tree") return ModelKind::DecisionTree;
    if (name == "random_forest") return ModelKind::RandomForest;
    if (name == "knn") return ModelKind::Knn;
    if (name == "surrogate") return ModelKind::Surrogate;
    throw ConfigError("unknown model kind '" + name + "'");
}

}  // namespace txadv

#include <algorithm>
#include <cmath>

#include "txadv/errors.hpp"
#include "txadv/models.hpp"

namespace txadv {

KnnModel KnnModel::fit(const Matrix& x, const std::vector<int>& y, std::size_t n_classes,
                       const KnnParams& params) {
    if (x.rows == 0 || x.rows != y.size())
        throw LengthMismatchError("feature matrix and label vector sizes differ");
    if (params.k < 1) throw DegenerateKError(params.k, x.rows);
    if (static_cast<std::size_t>(params.k) > x.rows) throw DegenerateKError(params.k, x.rows);
    bool multiple = false;
    for (std::size_t i = 1; i < y.size() && !multiple; ++i) multiple = (y[i] != y[0]);
    if (!multiple) throw SingleClassDatasetError("training split holds a single class");

    KnnModel model;
    model.train_ = x;
    model.labels_ = y;
    model.n_classes_ = n_classes;
    model.params_ = params;
    return model;
}

KnnModel KnnModel::from_parts(Matrix train, std::vector<int> labels, std::size_t n_classes,
                              const KnnParams& params) {
    KnnModel model;
    model.train_ = std::move(train);
    model.labels_ = std::move(labels);
    model.n_classes_ = n_classes;
    model.params_ = params;
    return model;
}

Matrix KnnModel::predict_proba(const Matrix& rows) const {
    if (rows.rows > 0 && rows.cols != train_.cols)
        throw WidthMismatchError(train_.cols, rows.cols);

    Matrix out(rows.rows, n_classes_);
    const auto k = static_cast<std::size_t>(params_.k);
    const std::size_t cols = train_.cols;
    const double* train_data = train_.data.data();
    std::vector<double> dists(train_.rows);
    std::vector<double> heap;  // max-heap of the k smallest distances
    heap.reserve(k);

    for (std::size_t r = 0; r < rows.rows; ++r) {
        const double* q = rows.data.data() + r * cols;
        heap.clear();
        for (std::size_t t = 0; t < train_.rows; ++t) {
            const double* p = train_data + t * cols;
            double d = 0.0;
            for (std::size_t c = 0; c < cols; ++c) {
                const double diff = q[c] - p[c];
                d += diff * diff;
            }
            dists[t] = d;
            if (heap.size() < k) {
                heap.push_back(d);
                std::push_heap(heap.begin(), heap.end());
            } else if (d < heap.front()) {
                std::pop_heap(heap.begin(), heap.end());
                heap.back() = d;
                std::push_heap(heap.begin(), heap.end());
            }
        }
        const double radius = heap.front();  // the k-th smallest distance

        // Everything inside the k-th radius votes; exact distance ties at
        // the boundary are all included.
        std::size_t votes = 0;
        for (std::size_t t = 0; t < train_.rows; ++t) {
            if (dists[t] <= radius) {
                out.at(r, static_cast<std::size_t>(labels_[t])) += 1.0;
                ++votes;
            }
        }
        for (std::size_t c = 0; c < n_classes_; ++c)
            out.at(r, c) /= static_cast<double>(votes);
    }
    return out;
}

}  // namespace txadv

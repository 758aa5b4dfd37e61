#include "txadv/eval.hpp"

#include <numeric>

#include "txadv/errors.hpp"

namespace txadv {

std::uint64_t ConfusionMatrix::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

ConfusionMatrix ConfusionMatrix::from_predictions(const std::vector<int>& y_true,
                                                  const std::vector<int>& y_pred,
                                                  std::size_t n_classes,
                                                  std::vector<std::string> class_names) {
    if (y_true.size() != y_pred.size())
        throw LengthMismatchError("prediction and label vectors differ in length");
    ConfusionMatrix m(n_classes, std::move(class_names));
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const auto t = static_cast<std::size_t>(y_true[i]);
        const auto p = static_cast<std::size_t>(y_pred[i]);
        if (t >= n_classes || p >= n_classes)
            throw BadLabelError("label outside [0, " + std::to_string(n_classes) + ")");
        ++m.at(t, p);
    }
    return m;
}

std::uint64_t FlowMatrix::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::vector<std::uint64_t> FlowMatrix::pre_counts() const {
    std::vector<std::uint64_t> sums(n_classes, 0);
    for (std::size_t i = 0; i < n_classes; ++i)
        for (std::size_t j = 0; j < n_classes; ++j) sums[i] += at(i, j);
    return sums;
}

EvaluationReport metrics(const ConfusionMatrix& confusion) {
    const std::uint64_t total = confusion.total();
    if (confusion.n_classes == 0 || total == 0)
        throw EmptyConfusionError("confusion matrix holds no observations");

    EvaluationReport report;
    report.confusion = confusion;

    std::uint64_t trace = 0;
    for (std::size_t c = 0; c < confusion.n_classes; ++c) trace += confusion.at(c, c);
    report.accuracy = static_cast<double>(trace) / static_cast<double>(total);

    for (std::size_t c = 0; c < confusion.n_classes; ++c) {
        ClassMetrics m;
        m.name = c < confusion.class_names.size() ? confusion.class_names[c]
                                                  : "class_" + std::to_string(c);
        const std::uint64_t tp = confusion.at(c, c);
        std::uint64_t col = 0, row = 0;
        for (std::size_t i = 0; i < confusion.n_classes; ++i) {
            col += confusion.at(i, c);
            row += confusion.at(c, i);
        }
        m.predicted_count = col;
        m.support = row;

        if (col == 0) {
            m.precision_zero_division = true;
        } else {
            m.precision = static_cast<double>(tp) / static_cast<double>(col);
        }
        if (row == 0) {
            m.recall_zero_division = true;
        } else {
            m.recall = static_cast<double>(tp) / static_cast<double>(row);
        }
        if (m.precision + m.recall == 0.0) {
            m.f1_zero_division = true;
        } else {
            m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
        }
        report.per_class.push_back(std::move(m));
    }

    const double n = static_cast<double>(confusion.n_classes);
    for (const auto& m : report.per_class) {
        report.macro_precision += m.precision / n;
        report.macro_recall += m.recall / n;
        report.macro_f1 += m.f1 / n;
    }
    report.metadata_json = "{}";
    return report;
}

EvaluationReport evaluate(const TrainedModel& model, const Matrix& rows,
                          const std::vector<int>& labels,
                          const std::vector<std::string>& class_names,
                          const std::string& metadata_json) {
    if (rows.rows > 0 && rows.cols != model.n_features())
        throw WidthMismatchError(model.n_features(), rows.cols);
    const auto predictions = model.predict(rows);
    auto report = metrics(ConfusionMatrix::from_predictions(labels, predictions,
                                                            model.n_classes(), class_names));
    report.metadata_json = metadata_json;
    return report;
}

FlowMatrix label_flow(const std::vector<int>& pre_predictions,
                      const std::vector<int>& post_predictions,
                      const std::vector<std::string>& class_names) {
    if (pre_predictions.size() != post_predictions.size())
        throw LengthMismatchError("pre and post prediction vectors differ in length");
    FlowMatrix flow;
    flow.n_classes = class_names.size();
    flow.class_names = class_names;
    flow.counts.assign(flow.n_classes * flow.n_classes, 0);
    for (std::size_t i = 0; i < pre_predictions.size(); ++i) {
        const auto pre = static_cast<std::size_t>(pre_predictions[i]);
        const auto post = static_cast<std::size_t>(post_predictions[i]);
        if (pre >= flow.n_classes || post >= flow.n_classes)
            throw BadLabelError("prediction outside [0, " + std::to_string(flow.n_classes) + ")");
        ++flow.at(pre, post);
    }
    return flow;
}

}  // namespace txadv

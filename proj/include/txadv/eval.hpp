#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "txadv/matrix.hpp"
#include "txadv/models.hpp"

namespace txadv {

// Rows index the true label, columns the predicted label.
struct ConfusionMatrix {
    std::size_t n_classes = 0;
    std::vector<std::uint64_t> counts;  // row-major
    std::vector<std::string> class_names;

    ConfusionMatrix() = default;
    ConfusionMatrix(std::size_t n, std::vector<std::string> names)
        : n_classes(n), counts(n * n, 0), class_names(std::move(names)) {}

    std::uint64_t& at(std::size_t t, std::size_t p) { return counts[t * n_classes + p]; }
    std::uint64_t at(std::size_t t, std::size_t p) const { return counts[t * n_classes + p]; }
    std::uint64_t total() const;

    static ConfusionMatrix from_predictions(const std::vector<int>& y_true,
                                            const std::vector<int>& y_pred,
                                            std::size_t n_classes,
                                            std::vector<std::string> class_names);
};

// Counts of prediction migration: entry (i, j) is the number of rows
// predicted i before the attack and j after it.
struct FlowMatrix {
    std::size_t n_classes = 0;
    std::vector<std::uint64_t> counts;
    std::vector<std::string> class_names;

    std::uint64_t& at(std::size_t pre, std::size_t post) { return counts[pre * n_classes + post]; }
    std::uint64_t at(std::size_t pre, std::size_t post) const { return counts[pre * n_classes + post]; }
    std::uint64_t total() const;
    std::vector<std::uint64_t> pre_counts() const;  // row sums

    bool operator==(const FlowMatrix&) const = default;
};

struct ClassMetrics {
    std::string name;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool precision_zero_division = false;
    bool recall_zero_division = false;
    bool f1_zero_division = false;
    std::uint64_t predicted_count = 0;  // column sum
    std::uint64_t support = 0;          // row sum
};

struct EvaluationReport {
    double accuracy = 0.0;
    std::vector<ClassMetrics> per_class;
    // Macro averages are an extension over the per-class tables and are
    // flagged as such in the serialized metadata.
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    ConfusionMatrix confusion;
    std::optional<FlowMatrix> flow;
    std::string metadata_json;  // canonical JSON object, "{}" when empty
};

// One-vs-rest precision/recall/F1 per class; any division by zero yields
// 0 with the corresponding flag set.
EvaluationReport metrics(const ConfusionMatrix& confusion);

EvaluationReport evaluate(const TrainedModel& model, const Matrix& rows,
                          const std::vector<int>& labels,
                          const std::vector<std::string>& class_names,
                          const std::string& metadata_json = "{}");

FlowMatrix label_flow(const std::vector<int>& pre_predictions,
                      const std::vector<int>& post_predictions,
                      const std::vector<std::string>& class_names);

// Serialization (key-sorted canonical JSON; CSV per-class tables plus a
// long-format variant for plotting).
std::string report_to_json(const EvaluationReport& report);
std::string report_to_csv(const EvaluationReport& report);
std::string report_to_long_csv(const EvaluationReport& report, const std::string& report_name);

}  // namespace txadv

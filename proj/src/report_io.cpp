#include <json.hpp>

#include "txadv/csv.hpp"
#include "txadv/eval.hpp"

namespace txadv {

namespace {

using nlohmann::json;

json confusion_to_json(const ConfusionMatrix& m) {
    json rows = json::array();
    for (std::size_t t = 0; t < m.n_classes; ++t) {
        json row = json::array();
        for (std::size_t p = 0; p < m.n_classes; ++p) row.push_back(m.at(t, p));
        rows.push_back(std::move(row));
    }
    return {{"classes", m.class_names}, {"counts", std::move(rows)}};
}

json flow_to_json(const FlowMatrix& m) {
    json rows = json::array();
    json rates = json::array();
    const auto pre = m.pre_counts();
    for (std::size_t i = 0; i < m.n_classes; ++i) {
        json row = json::array();
        json rate_row = json::array();
        for (std::size_t j = 0; j < m.n_classes; ++j) {
            row.push_back(m.at(i, j));
            rate_row.push_back(pre[i] == 0 ? 0.0
                                           : static_cast<double>(m.at(i, j)) /
                                                 static_cast<double>(pre[i]));
        }
        rows.push_back(std::move(row));
        rates.push_back(std::move(rate_row));
    }
    return {{"classes", m.class_names},
            {"counts", std::move(rows)},
            {"rates", std::move(rates)},
            {"rate_denominator", "pre_attack_predicted_count"}};
}

}  // namespace

std::string report_to_json(const EvaluationReport& report) {
    json j;
    j["accuracy"] = report.accuracy;
    json per_class = json::array();
    for (const auto& m : report.per_class) {
        per_class.push_back({{"class", m.name},
                             {"precision", m.precision},
                             {"recall", m.recall},
                             {"f1", m.f1},
                             {"precision_zero_division", m.precision_zero_division},
                             {"recall_zero_division", m.recall_zero_division},
                             {"f1_zero_division", m.f1_zero_division},
                             {"predicted_count", m.predicted_count},
                             {"support", m.support}});
    }
    j["per_class"] = std::move(per_class);
    // Per-class values are the primary table format; macro averages are
    // an extension and flagged as such.
    j["macro"] = {{"precision", report.macro_precision},
                  {"recall", report.macro_recall},
                  {"f1", report.macro_f1},
                  {"extension", true}};
    j["confusion"] = confusion_to_json(report.confusion);
    if (report.flow) j["label_flow"] = flow_to_json(*report.flow);
    j["metadata"] = json::parse(report.metadata_json.empty() ? "{}" : report.metadata_json);
    return j.dump(2);
}

std::string report_to_csv(const EvaluationReport& report) {
    std::string out = csv_join({"class", "precision", "recall", "f1",
                                "predicted_count", "support", "accuracy"});
    for (const auto& m : report.per_class) {
        out += csv_join({m.name, format_double(m.precision), format_double(m.recall),
                         format_double(m.f1), std::to_string(m.predicted_count),
                         std::to_string(m.support), format_double(report.accuracy)});
    }
    return out;
}

std::string report_to_long_csv(const EvaluationReport& report, const std::string& report_name) {
    std::string out;
    auto add = [&](const std::string& cls, const std::string& metric, const std::string& value) {
        out += csv_join({report_name, cls, metric, value});
    };
    add("", "accuracy", format_double(report.accuracy));
    for (const auto& m : report.per_class) {
        add(m.name, "precision", format_double(m.precision));
        add(m.name, "recall", format_double(m.recall));
        add(m.name, "f1", format_double(m.f1));
        add(m.name, "predicted_count", std::to_string(m.predicted_count));
        add(m.name, "support", std::to_string(m.support));
    }
    return out;
}

}  // namespace txadv

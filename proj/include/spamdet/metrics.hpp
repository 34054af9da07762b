#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "spamdet/error.hpp"

namespace spamdet {

/// Two-class evaluation in the per-class-recall convention: "average
/// accuracy" is the unweighted mean of the two recalls (macro recall), and
/// the F1 score is macro-averaged.
struct EvalReport {
    // confusion[t][p] = count of rows with true label t predicted as p
    std::array<std::array<std::int64_t, 2>, 2> confusion{};
    double recall_class0 = 0.0;
    double recall_class1 = 0.0;
    double average_accuracy = 0.0;
    double macro_f1 = 0.0;
};

inline EvalReport evaluate(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size()) throw LengthMismatchError();
    EvalReport r;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if ((y_true[i] != 0 && y_true[i] != 1) || (y_pred[i] != 0 && y_pred[i] != 1))
            throw std::invalid_argument("labels must be 0 or 1");
        ++r.confusion[y_true[i]][y_pred[i]];
    }
    const std::int64_t support0 = r.confusion[0][0] + r.confusion[0][1];
    const std::int64_t support1 = r.confusion[1][0] + r.confusion[1][1];
    if (support0 == 0 || support1 == 0) throw DegenerateEvalError();

    r.recall_class0 = static_cast<double>(r.confusion[0][0]) / static_cast<double>(support0);
    r.recall_class1 = static_cast<double>(r.confusion[1][1]) / static_cast<double>(support1);
    r.average_accuracy = (r.recall_class0 + r.recall_class1) / 2.0;

    double f1_sum = 0.0;
    for (int cls = 0; cls < 2; ++cls) {
        const double tp = static_cast<double>(r.confusion[cls][cls]);
        const double pred = static_cast<double>(r.confusion[0][cls] + r.confusion[1][cls]);
        const double truth = static_cast<double>(r.confusion[cls][0] + r.confusion[cls][1]);
        const double precision = pred > 0 ? tp / pred : 0.0;
        const double recall = tp / truth;
        f1_sum += precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    }
    r.macro_f1 = f1_sum / 2.0;
    return r;
}

inline nlohmann::ordered_json eval_report_to_json(const EvalReport& r) {
    nlohmann::ordered_json j;
    j["confusion"] = {{r.confusion[0][0], r.confusion[0][1]},
                      {r.confusion[1][0], r.confusion[1][1]}};
    j["recall_class0"] = r.recall_class0;
    j["recall_class1"] = r.recall_class1;
    j["average_accuracy"] = r.average_accuracy;
    j["macro_f1"] = r.macro_f1;
    return j;
}

}  // namespace spamdet

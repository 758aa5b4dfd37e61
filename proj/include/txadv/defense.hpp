#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "txadv/attacks.hpp"
#include "txadv/eval.hpp"
#include "txadv/models.hpp"
#include "txadv/preprocess.hpp"

namespace txadv {

struct DefenseConfig {
    std::vector<AttackPlan> plans;
    double augmentation_ratio = 0.5;  // AE rows added per original train row, in (0, 1]
    std::optional<ModelSpec> retrain_override;  // defaults to the attacked model's spec
    std::uint64_t seed = 0;
    // Single round by default. With more rounds the surrogate is refit on
    // the augmented data between rounds, so FGSM examples track the
    // hardened decision boundary; other plan families are unaffected.
    int rounds = 1;
};

// Adversarial rows generated from the training split. Labels always equal
// the source rows' true labels; provenance keeps the AE -> source map.
struct AeBatch {
    Matrix rows;
    std::vector<int> labels;
    std::vector<std::size_t> source_rows;  // dataset row indices (train only)
};

// Draws ceil(ratio * n_train) source rows (seeded, without replacement
// until the pool wraps) and applies the plans round-robin. Raw-record
// plans run on the source records and re-encode through the codec; FGSM
// plans perturb the already-encoded rows via the surrogate.
AeBatch generate_training_aes(const DatasetHandle& dataset, const EncodedDataset& encoded,
                              const DefenseConfig& config, const SoftmaxSurrogate* surrogate);

struct DefenseOutcome {
    std::unique_ptr<TrainedModel> model;
    AeBatch aes;  // the batch used for the final round
    // Present only in multi-round mode: the surrogate refit on the last
    // augmented training set.
    std::optional<SoftmaxSurrogate> round_surrogate;
};

// Fits the model spec on concat(original train, AE rows).
DefenseOutcome adversarial_train(const ModelSpec& spec, const DatasetHandle& dataset,
                                 const EncodedDataset& encoded, const DefenseConfig& config,
                                 const SoftmaxSurrogate* surrogate);

struct AttackedTestSet {
    std::string name;
    Matrix rows;
    std::vector<int> labels;
};

// Pre/post report pairs on clean and attacked test data, with prediction
// flow matrices against the clean predictions of the same model.
struct DefenseEvaluation {
    EvaluationReport clean_pre;   // undefended model, clean test
    EvaluationReport clean_post;  // defended model, clean test
    struct AttackPair {
        std::string name;
        EvaluationReport pre;
        EvaluationReport post;
    };
    std::vector<AttackPair> attacked;
};

DefenseEvaluation evaluate_defense(const TrainedModel& defended, const TrainedModel& plain,
                                   const Matrix& clean_test, const std::vector<int>& test_labels,
                                   const std::vector<AttackedTestSet>& attacked_tests,
                                   const std::vector<std::string>& class_names);

}  // namespace txadv

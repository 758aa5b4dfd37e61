#include "txadv/defense.hpp"

#include <cmath>

#include "txadv/rng.hpp"

namespace txadv {

AeBatch generate_training_aes(const DatasetHandle& dataset, const EncodedDataset& encoded,
                              const DefenseConfig& config, const SoftmaxSurrogate* surrogate) {
    if (config.plans.empty()) throw ConfigError("defense needs at least one attack plan");
    if (config.augmentation_ratio <= 0.0 || config.augmentation_ratio > 1.0)
        throw ConfigError("augmentation_ratio must lie in (0, 1]");
    for (const auto& plan : config.plans) {
        if (plan.family == AttackFamily::Fgsm && surrogate == nullptr)
            throw PreconditionError("an FGSM plan requires a fitted surrogate");
    }

    // Run every plan once over the full dataset, then gather AE rows by
    // source index. A source outside a plan's scope (class-scoped plans)
    // simply yields a clean duplicate.
    std::vector<Matrix> per_plan_encoded;
    per_plan_encoded.reserve(config.plans.size());
    for (const auto& plan : config.plans) {
        if (plan.family == AttackFamily::Fgsm) {
            const auto res =
                apply_fgsm_plan(encoded.matrix, encoded.labels, plan, encoded.codec, *surrogate);
            per_plan_encoded.push_back(res.rows);
        } else {
            const auto res = apply_plan(dataset, plan, &encoded.codec);
            per_plan_encoded.push_back(transform_rows(encoded.codec, res.perturbed));
        }
    }

    const auto train_idx = encoded.train_indices();
    const auto ae_count = static_cast<std::size_t>(
        std::ceil(config.augmentation_ratio * static_cast<double>(train_idx.size())));

    std::vector<std::size_t> order = train_idx;
    Rng rng(config.seed ^ 0xdefe45eULL);
    rng.shuffle(order);

    AeBatch batch;
    batch.rows = Matrix(0, encoded.matrix.cols);
    batch.rows.data.reserve(ae_count * encoded.matrix.cols);
    for (std::size_t j = 0; j < ae_count; ++j) {
        const std::size_t source = order[j % order.size()];
        const Matrix& attacked = per_plan_encoded[j % config.plans.size()];
        batch.rows.append_row(attacked.row(source));
        batch.labels.push_back(encoded.labels[source]);
        batch.source_rows.push_back(source);
    }
    return batch;
}

DefenseOutcome adversarial_train(const ModelSpec& spec, const DatasetHandle& dataset,
                                 const EncodedDataset& encoded, const DefenseConfig& config,
                                 const SoftmaxSurrogate* surrogate) {
    if (config.rounds < 1) throw ConfigError("defense rounds must be >= 1");

    DefenseOutcome outcome;
    outcome.aes.rows = Matrix(0, encoded.matrix.cols);
    const ModelSpec& retrain = config.retrain_override ? *config.retrain_override : spec;

    const Matrix base_train = encoded.train_matrix();
    const std::vector<int> base_labels = encoded.labels_at(encoded.train_indices());

    const SoftmaxSurrogate* current = surrogate;

    for (int round = 0; round < config.rounds; ++round) {
        if (config.augmentation_ratio > 0.0)
            outcome.aes = generate_training_aes(dataset, encoded, config, current);

        Matrix augmented = base_train;
        std::vector<int> labels = base_labels;
        for (std::size_t r = 0; r < outcome.aes.rows.rows; ++r) {
            augmented.append_row(outcome.aes.rows.row(r));
            labels.push_back(outcome.aes.labels[r]);
        }
        outcome.model = fit(retrain, augmented, labels, encoded.n_classes());

        if (round + 1 < config.rounds && current != nullptr) {
            outcome.round_surrogate = SoftmaxSurrogate::fit(augmented, labels, encoded.n_classes(),
                                                            current->params());
            current = &*outcome.round_surrogate;
        }
    }
    return outcome;
}

DefenseEvaluation evaluate_defense(const TrainedModel& defended, const TrainedModel& plain,
                                   const Matrix& clean_test, const std::vector<int>& test_labels,
                                   const std::vector<AttackedTestSet>& attacked_tests,
                                   const std::vector<std::string>& class_names) {
    if (defended.n_features() != plain.n_features())
        throw CodecMismatchError("defended and plain models expect different feature widths");
    if (clean_test.cols != plain.n_features())
        throw CodecMismatchError("test data width does not match the models");
    for (const auto& t : attacked_tests) {
        if (t.rows.cols != clean_test.cols)
            throw CodecMismatchError("attacked test '" + t.name +
                                     "' was encoded with a different codec");
    }

    DefenseEvaluation eval;
    eval.clean_pre = evaluate(plain, clean_test, test_labels, class_names);
    eval.clean_post = evaluate(defended, clean_test, test_labels, class_names);

    const auto pre_clean_preds = plain.predict(clean_test);
    const auto post_clean_preds = defended.predict(clean_test);

    for (const auto& t : attacked_tests) {
        DefenseEvaluation::AttackPair pair;
        pair.name = t.name;
        pair.pre = evaluate(plain, t.rows, t.labels, class_names);
        pair.post = evaluate(defended, t.rows, t.labels, class_names);
        // Flow of predictions from the clean to the attacked test, per model.
        pair.pre.flow = label_flow(pre_clean_preds, plain.predict(t.rows), class_names);
        pair.post.flow = label_flow(post_clean_preds, defended.predict(t.rows), class_names);
        eval.attacked.push_back(std::move(pair));
    }
    return eval;
}

}  // namespace txadv

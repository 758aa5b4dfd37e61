#include "txadv/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "txadv/csv.hpp"
#include "txadv/eval.hpp"
#include "txadv/preprocess.hpp"
#include "txadv/sha256.hpp"

namespace txadv {

namespace fs = std::filesystem;

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::vector<std::string>& allowed,
                    const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

DatasetSource dataset_from_json(const json& j) {
    DatasetSource src;
    reject_unknown(j, {"source", "schema", "path", "n_rows", "class_mix", "separability", "seed"},
                   "dataset");
    const auto source = j.at("source").get<std::string>();
    src.schema = schema_from_name(j.at("schema").get<std::string>());
    if (source == "csv") {
        src.synthetic = false;
        src.path = j.at("path").get<std::string>();
    } else if (source == "synthetic") {
        src.synthetic = true;
        src.n_rows = j.at("n_rows").get<std::size_t>();
        src.class_mix = j.at("class_mix").get<std::map<std::string, double>>();
        src.separability = j.value("separability", 0.9);
        src.seed = j.value("seed", std::uint64_t{0});
    } else {
        throw ConfigError("dataset source must be 'csv' or 'synthetic', got '" + source + "'");
    }
    return src;
}

json dataset_to_json(const DatasetSource& src) {
    json j;
    j["schema"] = schema_name(src.schema);
    if (src.synthetic) {
        j["source"] = "synthetic";
        j["n_rows"] = src.n_rows;
        j["class_mix"] = src.class_mix;
        j["separability"] = src.separability;
        j["seed"] = src.seed;
    } else {
        j["source"] = "csv";
        j["path"] = src.path;
    }
    return j;
}

ModelSpec model_from_json(const json& j, std::size_t index) {
    const std::string where = "models[" + std::to_string(index) + "]";
    ModelSpec spec;
    spec.kind = model_kind_from_name(j.at("kind").get<std::string>());
    switch (spec.kind) {
        case ModelKind::DecisionTree:
            reject_unknown(j, {"kind", "max_depth", "min_samples_leaf"}, where);
            spec.dt.max_depth = j.value("max_depth", 16);
            spec.dt.min_samples_leaf = j.value("min_samples_leaf", 2);
            break;
        case ModelKind::RandomForest:
            reject_unknown(j, {"kind", "n_trees", "max_depth", "min_samples_leaf",
                               "features_per_split", "bootstrap", "seed", "threads"},
                           where);
            spec.rf.n_trees = j.value("n_trees", 100);
            spec.rf.tree.max_depth = j.value("max_depth", 16);
            spec.rf.tree.min_samples_leaf = j.value("min_samples_leaf", 2);
            spec.rf.features_per_split = j.value("features_per_split", 0);
            spec.rf.bootstrap = j.value("bootstrap", true);
            spec.rf.seed = j.value("seed", std::uint64_t{0});
            spec.rf.threads = j.value("threads", 1);
            if (spec.rf.threads < 1) throw ConfigError("threads must be >= 1 in " + where);
            break;
        case ModelKind::Knn:
            reject_unknown(j, {"kind", "k"}, where);
            spec.knn.k = j.value("k", 5);
            break;
        case ModelKind::Surrogate:
            reject_unknown(j, {"kind", "learning_rate", "epochs", "l2", "seed"}, where);
            spec.surrogate.learning_rate = j.value("learning_rate", 0.1);
            spec.surrogate.epochs = j.value("epochs", 200);
            spec.surrogate.l2 = j.value("l2", 1e-4);
            spec.surrogate.seed = j.value("seed", std::uint64_t{0});
            break;
    }
    return spec;
}

json model_to_json_obj(const ModelSpec& spec) {
    json j;
    j["kind"] = model_kind_name(spec.kind);
    switch (spec.kind) {
        case ModelKind::DecisionTree:
            j["max_depth"] = spec.dt.max_depth;
            j["min_samples_leaf"] = spec.dt.min_samples_leaf;
            break;
        case ModelKind::RandomForest:
            j["n_trees"] = spec.rf.n_trees;
            j["max_depth"] = spec.rf.tree.max_depth;
            j["min_samples_leaf"] = spec.rf.tree.min_samples_leaf;
            j["features_per_split"] = spec.rf.features_per_split;
            j["bootstrap"] = spec.rf.bootstrap;
            j["seed"] = spec.rf.seed;
            j["threads"] = spec.rf.threads;
            break;
        case ModelKind::Knn:
            j["k"] = spec.knn.k;
            break;
        case ModelKind::Surrogate:
            j["learning_rate"] = spec.surrogate.learning_rate;
            j["epochs"] = spec.surrogate.epochs;
            j["l2"] = spec.surrogate.l2;
            j["seed"] = spec.surrogate.seed;
            break;
    }
    return j;
}

void atomic_write(const fs::path& path, const std::string& body) {
    fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << body;
    }
    fs::rename(tmp, path);
}

std::string scope_name(EvaluationScope scope) {
    return scope == EvaluationScope::FullDataset ? "full_dataset" : "test_split";
}

}  // namespace

std::string model_spec_name(const ModelSpec& spec) {
    switch (spec.kind) {
        case ModelKind::DecisionTree: return "dt";
        case ModelKind::RandomForest: return "rf";
        case ModelKind::Knn: return "knn";
        case ModelKind::Surrogate: return "surrogate";
    }
    return "model";
}

ExperimentConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config JSON parse error: ") + e.what());
    }
    reject_unknown(j, {"dataset", "split_seed", "models", "surrogate", "attacks", "defense",
                       "evaluation_scope", "output_dir", "seed"},
                   "config");

    ExperimentConfig config;
    config.dataset = dataset_from_json(j.at("dataset"));
    config.seed = j.value("seed", std::uint64_t{0});
    config.split_seed = j.value("split_seed", config.seed ^ 0x5914ULL);

    if (!j.contains("models") || !j.at("models").is_array() || j.at("models").empty())
        throw ConfigError("config needs a non-empty 'models' array");
    for (std::size_t i = 0; i < j.at("models").size(); ++i)
        config.models.push_back(model_from_json(j.at("models")[i], i));

    if (j.contains("surrogate")) {
        const auto& js = j.at("surrogate");
        reject_unknown(js, {"learning_rate", "epochs", "l2", "seed"}, "surrogate");
        config.surrogate.learning_rate = js.value("learning_rate", 0.1);
        config.surrogate.epochs = js.value("epochs", 200);
        config.surrogate.l2 = js.value("l2", 1e-4);
        config.surrogate.seed = js.value("seed", std::uint64_t{0});
    }

    if (j.contains("attacks")) {
        for (const auto& jp : j.at("attacks"))
            config.attacks.push_back(plan_from_json(jp.dump(), config.dataset.schema));
    }

    if (j.contains("defense")) {
        const auto& jd = j.at("defense");
        reject_unknown(jd, {"plans", "augmentation_ratio", "seed", "retrain", "rounds"}, "defense");
        DefenseConfig defense;
        for (const auto& jp : jd.at("plans"))
            defense.plans.push_back(plan_from_json(jp.dump(), config.dataset.schema));
        defense.augmentation_ratio = jd.value("augmentation_ratio", 0.5);
        defense.seed = jd.value("seed", std::uint64_t{0});
        defense.rounds = jd.value("rounds", 1);
        if (jd.contains("retrain"))
            defense.retrain_override = model_from_json(jd.at("retrain"), 0);
        if (defense.plans.empty()) throw ConfigError("defense needs at least one plan");
        if (defense.augmentation_ratio <= 0.0 || defense.augmentation_ratio > 1.0)
            throw ConfigError("defense augmentation_ratio must lie in (0, 1]");
        if (defense.rounds < 1) throw ConfigError("defense rounds must be >= 1");
        config.defense = std::move(defense);
    }

    const auto scope = j.value("evaluation_scope", "full_dataset");
    if (scope == "full_dataset") config.scope = EvaluationScope::FullDataset;
    else if (scope == "test_split") config.scope = EvaluationScope::TestSplit;
    else throw ConfigError("evaluation_scope must be 'full_dataset' or 'test_split'");

    config.output_dir = j.value("output_dir", "txadv-out");
    return config;
}

std::string config_to_json(const ExperimentConfig& config) {
    json j;
    j["dataset"] = dataset_to_json(config.dataset);
    j["split_seed"] = config.split_seed;
    json models = json::array();
    for (const auto& m : config.models) models.push_back(model_to_json_obj(m));
    j["models"] = std::move(models);
    j["surrogate"] = {{"learning_rate", config.surrogate.learning_rate},
                      {"epochs", config.surrogate.epochs},
                      {"l2", config.surrogate.l2},
                      {"seed", config.surrogate.seed}};
    json attacks = json::array();
    for (const auto& plan : config.attacks)
        attacks.push_back(json::parse(plan_to_json(plan, config.dataset.schema)));
    j["attacks"] = std::move(attacks);
    if (config.defense) {
        json plans = json::array();
        for (const auto& plan : config.defense->plans)
            plans.push_back(json::parse(plan_to_json(plan, config.dataset.schema)));
        json jd;
        jd["plans"] = std::move(plans);
        jd["augmentation_ratio"] = config.defense->augmentation_ratio;
        jd["seed"] = config.defense->seed;
        jd["rounds"] = config.defense->rounds;
        if (config.defense->retrain_override)
            jd["retrain"] = model_to_json_obj(*config.defense->retrain_override);
        j["defense"] = std::move(jd);
    }
    j["evaluation_scope"] = scope_name(config.scope);
    j["output_dir"] = config.output_dir;
    j["seed"] = config.seed;
    return j.dump(2);
}

RunResult run_experiment(const ExperimentConfig& config, const std::string& out_dir) {
    const fs::path root(out_dir);
    std::map<std::string, std::string> artifact_digests;  // sorted relpath -> sha256

    auto write_artifact = [&](const std::string& rel, const std::string& body) {
        atomic_write(root / rel, body);
        artifact_digests[rel] = sha256_hex(body);
    };

    // 1. Dataset.
    DatasetHandle raw = config.dataset.synthetic
                            ? synthesize(config.dataset.schema, config.dataset.n_rows,
                                         config.dataset.class_mix, config.dataset.separability,
                                         config.dataset.seed)
                            : load_csv(config.dataset.path, config.dataset.schema);
    DatasetHandle prepared = impute(raw);
    if (prepared.schema == Schema::Multi) prepared = engineer_features(prepared);

    // 2. Encoding and evaluation scope.
    EncodedDataset enc = fit_transform(prepared, config.split_seed);
    write_artifact("artifacts/codec.json", codec_to_json(enc.codec));

    std::vector<std::size_t> scope_rows;
    if (config.scope == EvaluationScope::FullDataset) {
        scope_rows.resize(enc.matrix.rows);
        for (std::size_t i = 0; i < scope_rows.size(); ++i) scope_rows[i] = i;
    } else {
        scope_rows = enc.test_indices();
    }
    const Matrix scope_matrix = enc.matrix.select_rows(scope_rows);
    const std::vector<int> scope_labels = enc.labels_at(scope_rows);

    // 3. Surrogate (gradient source for any FGSM plan; also reported).
    const auto train_idx = enc.train_indices();
    SoftmaxSurrogate surrogate = SoftmaxSurrogate::fit(
        enc.train_matrix(), enc.labels_at(train_idx), enc.n_classes(), config.surrogate);

    auto metadata = [&](const std::string& model_name, const std::string& plan_slug) {
        json meta;
        meta["model"] = model_name;
        meta["dataset"] = prepared.provenance;
        meta["scope"] = scope_name(config.scope);
        meta["seed"] = config.seed;
        meta["split_seed"] = config.split_seed;
        if (!plan_slug.empty()) meta["attack"] = plan_slug;
        return meta.dump();
    };

    // 4. Models and baseline reports.
    std::vector<std::unique_ptr<TrainedModel>> models;
    std::vector<std::string> model_names;
    std::vector<std::vector<int>> baseline_preds;
    std::string long_csv = csv_join({"report", "class", "metric", "value"});

    for (const auto& spec : config.models) {
        auto model = fit(spec, enc.train_matrix(), enc.labels_at(train_idx), enc.n_classes());
        const std::string name = model_spec_name(spec);
        const auto report =
            evaluate(*model, scope_matrix, scope_labels, enc.class_names, metadata(name, ""));
        write_artifact("reports/baseline_" + name + ".json", report_to_json(report));
        write_artifact("tables/baseline_" + name + ".csv", report_to_csv(report));
        long_csv += report_to_long_csv(report, "baseline_" + name);
        baseline_preds.push_back(model->predict(scope_matrix));
        models.push_back(std::move(model));
        model_names.push_back(name);
    }

    // 5. Attack grid.
    for (const auto& plan : config.attacks) {
        const std::string slug = plan.name();
        Matrix attacked_full(0, enc.matrix.cols);

        if (plan.family == AttackFamily::Fgsm) {
            const auto res = apply_fgsm_plan(enc.matrix, enc.labels, plan, enc.codec, surrogate);
            attacked_full = res.rows;
            // Readable artifact: decode z-scored numerics back to raw units.
            std::string csv = csv_join(enc.feature_names);
            for (std::size_t r = 0; r < attacked_full.rows; ++r) {
                std::vector<std::string> cells;
                for (std::size_t c = 0; c < attacked_full.cols; ++c) {
                    const auto& feat = enc.codec.features[c];
                    double v = attacked_full.at(r, c);
                    if (feat.kind == FeatureKind::NumericZscore ||
                        feat.kind == FeatureKind::HexDerived)
                        v = v * feat.sigma + feat.mean;
                    cells.push_back(format_double(v));
                }
                csv += csv_join(cells);
            }
            write_artifact("artifacts/" + slug + ".csv", csv);
            json sidecar;
            sidecar["plan"] = json::parse(plan_to_json(plan, config.dataset.schema));
            sidecar["touched_rows"] = res.touched_rows;
            sidecar["touched_features"] = res.touched_features;
            write_artifact("artifacts/" + slug + ".touched.json", sidecar.dump(2));
        } else {
            const auto res = apply_plan(prepared, plan, &enc.codec);
            attacked_full = transform_rows(enc.codec, res.perturbed);
            write_artifact("artifacts/" + slug + ".csv", to_csv_text(res.perturbed));
            write_artifact("artifacts/" + slug + ".touched.json",
                           perturbation_sidecar_json(res, config.dataset.schema));
        }

        const Matrix attacked_scope = attacked_full.select_rows(scope_rows);
        for (std::size_t m = 0; m < models.size(); ++m) {
            auto report = evaluate(*models[m], attacked_scope, scope_labels, enc.class_names,
                                   metadata(model_names[m], slug));
            report.flow =
                label_flow(baseline_preds[m], models[m]->predict(attacked_scope), enc.class_names);
            const std::string stem = slug + "_" + model_names[m];
            write_artifact("reports/" + stem + ".json", report_to_json(report));
            write_artifact("tables/" + stem + ".csv", report_to_csv(report));
            long_csv += report_to_long_csv(report, stem);
        }
    }

    // 6. Defense round.
    if (config.defense) {
        // Attacked variants of the test split, one per defense plan.
        const auto test_idx = enc.test_indices();
        const Matrix clean_test = enc.matrix.select_rows(test_idx);
        const std::vector<int> test_labels = enc.labels_at(test_idx);

        std::vector<AttackedTestSet> attacked_tests;
        for (const auto& plan : config.defense->plans) {
            AttackedTestSet set;
            set.name = plan.name();
            if (plan.family == AttackFamily::Fgsm) {
                const auto res = apply_fgsm_plan(enc.matrix, enc.labels, plan, enc.codec, surrogate);
                set.rows = res.rows.select_rows(test_idx);
            } else {
                const auto res = apply_plan(prepared, plan, &enc.codec);
                set.rows = transform_rows(enc.codec, res.perturbed).select_rows(test_idx);
            }
            set.labels = test_labels;
            attacked_tests.push_back(std::move(set));
        }

        for (std::size_t m = 0; m < models.size(); ++m) {
            const auto outcome = adversarial_train(config.models[m], prepared, enc,
                                                   *config.defense, &surrogate);
            const auto eval = evaluate_defense(*outcome.model, *models[m], clean_test, test_labels,
                                               attacked_tests, enc.class_names);
            json jd;
            jd["model"] = model_names[m];
            jd["augmentation_ratio"] = config.defense->augmentation_ratio;
            jd["ae_count"] = outcome.aes.rows.rows;
            jd["clean_pre"] = json::parse(report_to_json(eval.clean_pre));
            jd["clean_post"] = json::parse(report_to_json(eval.clean_post));
            json attacked = json::array();
            for (const auto& pair : eval.attacked) {
                attacked.push_back({{"name", pair.name},
                                    {"pre", json::parse(report_to_json(pair.pre))},
                                    {"post", json::parse(report_to_json(pair.post))}});
            }
            jd["attacked"] = std::move(attacked);
            write_artifact("reports/defense_" + model_names[m] + ".json", jd.dump(2));
            long_csv += report_to_long_csv(eval.clean_post, "defense_" + model_names[m] + "_clean_post");
            for (const auto& pair : eval.attacked) {
                long_csv += report_to_long_csv(
                    pair.pre, "defense_" + model_names[m] + "_" + pair.name + "_pre");
                long_csv += report_to_long_csv(
                    pair.post, "defense_" + model_names[m] + "_" + pair.name + "_post");
            }
        }
    }

    write_artifact("tables/summary_long.csv", long_csv);

    // 7. Manifest: config echo, seeds and content digests.
    json manifest;
    manifest["tool"] = "txadv";
    manifest["version"] = 1;
    manifest["config"] = json::parse(config_to_json(config));
    manifest["seed"] = config.seed;
    manifest["split_seed"] = config.split_seed;
    json digests;
    for (const auto& [rel, digest] : artifact_digests) digests[rel] = digest;
    manifest["artifacts"] = std::move(digests);

    const std::string manifest_body = manifest.dump(2);
    atomic_write(root / "manifest.json", manifest_body);

    RunResult result;
    result.manifest_path = (root / "manifest.json").string();
    result.manifest_digest = sha256_hex(manifest_body);
    return result;
}

}  // namespace txadv

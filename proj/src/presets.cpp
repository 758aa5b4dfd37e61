#include "txadv/experiment.hpp"

namespace txadv {

namespace {

ModelSpec rf_spec(std::uint64_t seed) {
    ModelSpec spec;
    spec.kind = ModelKind::RandomForest;
    spec.rf.seed = seed;
    return spec;
}

ModelSpec dt_spec() {
    ModelSpec spec;
    spec.kind = ModelKind::DecisionTree;
    return spec;
}

ModelSpec knn_spec() {
    ModelSpec spec;
    spec.kind = ModelKind::Knn;
    return spec;
}

ExperimentConfig base_binary(std::size_t n_rows, std::uint64_t seed) {
    ExperimentConfig config;
    config.dataset.synthetic = true;
    config.dataset.schema = Schema::Binary;
    config.dataset.n_rows = n_rows;
    config.dataset.class_mix = {{"Benign", 0.68}, {"Phishing", 0.32}};
    config.dataset.separability = 0.85;
    config.dataset.seed = seed;
    config.seed = seed;
    config.split_seed = seed ^ 0x5914ULL;
    config.models = {rf_spec(seed), dt_spec(), knn_spec()};
    return config;
}

ExperimentConfig base_multi(std::size_t n_rows, std::uint64_t seed) {
    ExperimentConfig config;
    config.dataset.synthetic = true;
    config.dataset.schema = Schema::Multi;
    config.dataset.n_rows = n_rows;
    config.dataset.class_mix = {{"Benign", 0.79}, {"Scamming", 0.16}, {"Phishing", 0.05}};
    config.dataset.separability = 0.85;
    config.dataset.seed = seed;
    config.seed = seed;
    config.split_seed = seed ^ 0x5914ULL;
    config.models = {rf_spec(seed), dt_spec(), knn_spec()};
    return config;
}

AttackPlan ts_plan(std::int64_t shift) {
    AttackPlan plan;
    plan.family = AttackFamily::TimestampShift;
    plan.shift_seconds = shift;
    return plan;
}

AttackPlan rule_plan(int target_class, std::uint64_t seed) {
    AttackPlan plan;
    plan.family = AttackFamily::RuleBasedTargeted;
    plan.target_class = target_class;
    plan.seed = seed;
    return plan;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"timestamp_grid", "value_grid",    "address_grid",     "untargeted_groups",
            "rule_targeted",  "fgsm_targeted", "defense_roundtrip"};
}

ExperimentConfig preset(const std::string& name) {
    if (name == "timestamp_grid") {
        auto config = base_binary(4000, 11);
        config.output_dir = "out-timestamp_grid";
        for (std::int64_t shift : kAllowedTimestampShifts) config.attacks.push_back(ts_plan(shift));
        return config;
    }
    if (name == "value_grid") {
        auto config = base_binary(4000, 12);
        config.output_dir = "out-value_grid";
        AttackPlan uniform;
        uniform.family = AttackFamily::ValueUniform;
        uniform.pct = 0.01;
        AttackPlan proportional;
        proportional.family = AttackFamily::ValueProportional;
        proportional.max_pct = 0.01;
        proportional.seed = 12;
        config.attacks = {uniform, proportional};
        return config;
    }
    if (name == "address_grid") {
        // Row counts follow the published grid; the synthetic set matches
        // the binary corpus size so the largest preset covers every row.
        auto config = base_binary(23472, 13);
        config.output_dir = "out-address_grid";
        for (const auto field : {AddressField::From, AddressField::To}) {
            for (std::size_t n : {std::size_t{5000}, std::size_t{10000}, std::size_t{23472}}) {
                AttackPlan plan;
                plan.family = AttackFamily::AddressSubstitute;
                plan.field = field;
                plan.mode = AddressMode::ShuffleWithin;
                plan.n_rows = n;
                plan.seed = 13;
                config.attacks.push_back(plan);
            }
        }
        return config;
    }
    if (name == "untargeted_groups") {
        auto config = base_multi(2000, 14);
        config.output_dir = "out-untargeted_groups";
        for (const auto group : {FeatureGroup::All, FeatureGroup::Address, FeatureGroup::Financial,
                                 FeatureGroup::Temporal}) {
            AttackPlan plan;
            plan.family = AttackFamily::UntargetedGroup;
            plan.group = group;
            plan.noise_scale = 0.5;
            plan.seed = 14;
            config.attacks.push_back(plan);
        }
        return config;
    }
    if (name == "rule_targeted") {
        auto config = base_multi(2000, 15);
        config.output_dir = "out-rule_targeted";
        config.attacks = {rule_plan(kBenign, 15), rule_plan(kPhishing, 15),
                          rule_plan(kScamming, 15)};
        return config;
    }
    if (name == "fgsm_targeted") {
        auto config = base_multi(2000, 16);
        config.output_dir = "out-fgsm_targeted";
        for (int cls : {kBenign, kPhishing, kScamming}) {
            AttackPlan plan;
            plan.family = AttackFamily::Fgsm;
            plan.epsilon = 0.1;
            plan.selection.kind = RowSelection::Kind::ByClass;
            plan.selection.label = cls;
            config.attacks.push_back(plan);
        }
        return config;
    }
    if (name == "defense_roundtrip") {
        auto config = base_binary(1200, 17);
        config.output_dir = "out-defense_roundtrip";
        AttackPlan uniform;
        uniform.family = AttackFamily::ValueUniform;
        uniform.pct = 0.01;
        config.attacks = {ts_plan(86400), uniform};
        DefenseConfig defense;
        defense.plans = {ts_plan(86400), rule_plan(kBenign, 17), rule_plan(kPhishing, 17)};
        defense.augmentation_ratio = 0.5;
        defense.seed = 17;
        config.defense = defense;
        return config;
    }
    throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace txadv

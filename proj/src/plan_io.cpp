#include <json.hpp>

#include <algorithm>

#include "txadv/attacks.hpp"

namespace txadv {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

json selection_to_json(const RowSelection& sel, Schema schema) {
    switch (sel.kind) {
        case RowSelection::Kind::All:
            return {{"kind", "all"}};
        case RowSelection::Kind::FirstN:
            return {{"kind", "first_n"}, {"n", sel.n}};
        case RowSelection::Kind::ByClass:
            return {{"kind", "class"},
                    {"label", class_names_for(schema)[static_cast<std::size_t>(sel.label)]}};
    }
    return {{"kind", "all"}};
}

RowSelection selection_from_json(const json& j, Schema schema) {
    RowSelection sel;
    if (j.is_null()) return sel;
    reject_unknown_keys(j, {"kind", "n", "label"}, "selection");
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "all") {
        sel.kind = RowSelection::Kind::All;
    } else if (kind == "first_n") {
        sel.kind = RowSelection::Kind::FirstN;
        sel.n = j.at("n").get<std::size_t>();
    } else if (kind == "class") {
        sel.kind = RowSelection::Kind::ByClass;
        const auto& label = j.at("label");
        sel.label = label.is_string() ? class_id_from_name(schema, label.get<std::string>())
                                      : label.get<int>();
    } else {
        throw ConfigError("unknown selection kind '" + kind + "'");
    }
    return sel;
}

AttackPlan attack_plan_from_json_obj(const json& j, Schema schema);

}  // namespace

std::string plan_to_json(const AttackPlan& plan, Schema schema) {
    json j;
    j["family"] = family_name(plan.family);
    j["selection"] = selection_to_json(plan.selection, schema);
    j["seed"] = plan.seed;
    switch (plan.family) {
        case AttackFamily::TimestampShift:
            j["shift_seconds"] = plan.shift_seconds;
            if (plan.custom_shift) j["custom"] = true;
            break;
        case AttackFamily::ValueUniform:
            j["pct"] = plan.pct;
            break;
        case AttackFamily::ValueProportional:
            j["max_pct"] = plan.max_pct;
            break;
        case AttackFamily::AddressSubstitute:
            j["field"] = plan.field == AddressField::From ? "from" : "to";
            j["mode"] = plan.mode == AddressMode::ShuffleWithin ? "shuffle_within"
                                                                : "unseen_random_hex";
            j["n_rows"] = plan.n_rows;
            break;
        case AttackFamily::UntargetedGroup:
            j["group"] = group_name(plan.group);
            j["noise_scale"] = plan.noise_scale;
            break;
        case AttackFamily::RuleBasedTargeted:
            j["target_class"] =
                class_names_for(schema)[static_cast<std::size_t>(plan.target_class)];
            j["value_pct"] = plan.magnitudes.value_pct;
            j["gas_pct"] = plan.magnitudes.gas_pct;
            j["timestamp_seconds"] = plan.magnitudes.timestamp_seconds;
            break;
        case AttackFamily::Fgsm:
            j["epsilon"] = plan.epsilon;
            j["feature_mask"] =
                plan.feature_mask.empty() ? default_fgsm_mask(schema) : plan.feature_mask;
            break;
    }
    return j.dump(2);
}

namespace {

AttackPlan attack_plan_from_json_obj(const json& j, Schema schema) {
    AttackPlan plan;
    plan.family = family_from_name(j.at("family").get<std::string>());
    if (j.contains("selection")) plan.selection = selection_from_json(j.at("selection"), schema);
    plan.seed = j.value("seed", std::uint64_t{0});

    const std::vector<std::string> common = {"family", "selection", "seed"};
    auto allowed = common;
    switch (plan.family) {
        case AttackFamily::TimestampShift: {
            allowed.insert(allowed.end(), {"shift_seconds", "custom"});
            reject_unknown_keys(j, allowed, "timestamp_shift plan");
            plan.shift_seconds = j.at("shift_seconds").get<std::int64_t>();
            plan.custom_shift = j.value("custom", false);
            if (!plan.custom_shift) {
                const bool preset = std::find(kAllowedTimestampShifts.begin(),
                                              kAllowedTimestampShifts.end(), plan.shift_seconds) !=
                                    kAllowedTimestampShifts.end();
                if (!preset)
                    throw ConfigError("shift_seconds " + std::to_string(plan.shift_seconds) +
                                      " is not a preset interval; set \"custom\": true to use it");
            }
            break;
        }
        case AttackFamily::ValueUniform:
            allowed.push_back("pct");
            reject_unknown_keys(j, allowed, "value_uniform plan");
            plan.pct = j.at("pct").get<double>();
            if (plan.pct <= 0.0) throw ConfigError("pct must be > 0");
            break;
        case AttackFamily::ValueProportional:
            allowed.push_back("max_pct");
            reject_unknown_keys(j, allowed, "value_proportional plan");
            plan.max_pct = j.at("max_pct").get<double>();
            if (plan.max_pct <= 0.0) throw ConfigError("max_pct must be > 0");
            break;
        case AttackFamily::AddressSubstitute: {
            allowed.insert(allowed.end(), {"field", "mode", "n_rows"});
            reject_unknown_keys(j, allowed, "address_substitute plan");
            if (plan.selection.kind != RowSelection::Kind::All)
                throw ConfigError(
                    "address_substitute draws its rows via n_rows; selection must be 'all'");
            const auto field = j.at("field").get<std::string>();
            if (field == "from") plan.field = AddressField::From;
            else if (field == "to") plan.field = AddressField::To;
            else throw ConfigError("address field must be 'from' or 'to', got '" + field + "'");
            const auto mode = j.value("mode", "shuffle_within");
            if (mode == "shuffle_within") plan.mode = AddressMode::ShuffleWithin;
            else if (mode == "unseen_random_hex") plan.mode = AddressMode::UnseenRandomHex;
            else throw ConfigError("unknown address mode '" + mode + "'");
            plan.n_rows = j.at("n_rows").get<std::size_t>();
            break;
        }
        case AttackFamily::UntargetedGroup:
            allowed.insert(allowed.end(), {"group", "noise_scale"});
            reject_unknown_keys(j, allowed, "untargeted_group plan");
            plan.group = group_from_name(j.at("group").get<std::string>());
            plan.noise_scale = j.value("noise_scale", 0.5);
            if (plan.noise_scale <= 0.0) throw ConfigError("noise_scale must be > 0");
            break;
        case AttackFamily::RuleBasedTargeted: {
            allowed.insert(allowed.end(), {"target_class", "value_pct", "gas_pct",
                                           "timestamp_seconds"});
            reject_unknown_keys(j, allowed, "rule_targeted plan");
            const auto& target = j.at("target_class");
            plan.target_class = target.is_string()
                                    ? class_id_from_name(schema, target.get<std::string>())
                                    : target.get<int>();
            plan.magnitudes.value_pct = j.value("value_pct", 0.01);
            plan.magnitudes.gas_pct = j.value("gas_pct", 0.01);
            plan.magnitudes.timestamp_seconds = j.value("timestamp_seconds", std::int64_t{300});
            break;
        }
        case AttackFamily::Fgsm:
            allowed.insert(allowed.end(), {"epsilon", "feature_mask"});
            reject_unknown_keys(j, allowed, "fgsm plan");
            plan.epsilon = j.value("epsilon", 0.1);
            if (plan.epsilon <= 0.0) throw ConfigError("epsilon must be > 0");
            if (j.contains("feature_mask"))
                plan.feature_mask = j.at("feature_mask").get<std::vector<std::string>>();
            break;
    }
    return plan;
}

}  // namespace

AttackPlan plan_from_json(const std::string& text, Schema schema) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("attack plan JSON parse error: ") + e.what());
    }
    return attack_plan_from_json_obj(j, schema);
}

}  // namespace txadv

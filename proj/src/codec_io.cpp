#include <json.hpp>

#include "txadv/preprocess.hpp"

namespace txadv {

namespace {

std::string kind_name(FeatureKind k) {
    switch (k) {
        case FeatureKind::NumericZscore: return "numeric_zscore";
        case FeatureKind::CategoricalVocab: return "categorical_vocab";
        case FeatureKind::HexDerived: return "hexdata_derived";
        case FeatureKind::Passthrough: return "passthrough";
    }
    return "numeric_zscore";
}

FeatureKind kind_from_name(const std::string& name) {
    if (name == "numeric_zscore") return FeatureKind::NumericZscore;
    if (name == "categorical_vocab") return FeatureKind::CategoricalVocab;
    if (name == "hexdata_derived") return FeatureKind::HexDerived;
    if (name == "passthrough") return FeatureKind::Passthrough;
    throw ConfigError("unknown feature kind '" + name + "'");
}

}  // namespace

std::string codec_to_json(const FeatureCodec& codec) {
    nlohmann::json j;
    j["format"] = "txadv-codec";
    j["version"] = 1;
    j["schema"] = schema_name(codec.schema);
    nlohmann::json feats = nlohmann::json::array();
    for (const auto& f : codec.features) {
        nlohmann::json jf;
        jf["name"] = f.name;
        jf["kind"] = kind_name(f.kind);
        if (f.kind == FeatureKind::CategoricalVocab) {
            jf["tokens"] = f.tokens;
        } else {
            jf["mean"] = f.mean;
            jf["sigma"] = f.sigma;
        }
        jf["train_min"] = f.train_min;
        jf["train_max"] = f.train_max;
        if (!f.hex_rule.empty()) jf["hex_rule"] = f.hex_rule;
        feats.push_back(std::move(jf));
    }
    j["features"] = std::move(feats);
    return j.dump(2);
}

FeatureCodec codec_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("codec JSON parse error: ") + e.what());
    }
    if (j.value("format", "") != "txadv-codec")
        throw ConfigError("not a txadv codec document");

    FeatureCodec codec;
    codec.schema = schema_from_name(j.at("schema").get<std::string>());
    for (const auto& jf : j.at("features")) {
        FeatureCodec::Feature f;
        f.name = jf.at("name").get<std::string>();
        f.kind = kind_from_name(jf.at("kind").get<std::string>());
        if (f.kind == FeatureKind::CategoricalVocab) {
            f.tokens = jf.at("tokens").get<std::vector<std::string>>();
            for (std::size_t i = 0; i < f.tokens.size(); ++i)
                f.vocab.emplace(f.tokens[i], static_cast<int>(i));
        } else {
            f.mean = jf.at("mean").get<double>();
            f.sigma = jf.at("sigma").get<double>();
        }
        f.train_min = jf.at("train_min").get<double>();
        f.train_max = jf.at("train_max").get<double>();
        f.hex_rule = jf.value("hex_rule", "");
        codec.features.push_back(std::move(f));
    }
    return codec;
}

}  // namespace txadv

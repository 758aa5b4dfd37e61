#include "txadv/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "txadv/hexutil.hpp"
#include "txadv/rng.hpp"

namespace txadv {

namespace {

// Field accessors shared by fit and transform. Raw ids double as the
// dispatch key so encoding never compares strings per cell.
enum class FieldId {
    // binary
    BlockHeight, Timestamp, FromB, ToB, ValueB, ContractAddress, InputLenB, InputPrefixB,
    // multi
    Nonce, TransactionIndex, FromM, ToM, ValueM, Gas, GasPrice, InputLenM, InputPrefixM,
    ReceiptCumulativeGasUsed, ReceiptGasUsed, BlockTimestamp, BlockNumber,
    FromScam, ToScam, FromCategory, ToCategory, CombinedCategory,
};

struct FeatureDef {
    const char* name;
    FeatureKind kind;
    FieldId field;
    const char* hex_rule;  // nullptr unless kind == HexDerived
};

const std::vector<FeatureDef>& feature_defs(Schema schema) {
    static const std::vector<FeatureDef> binary = {
        {"block_height", FeatureKind::NumericZscore, FieldId::BlockHeight, nullptr},
        {"timestamp", FeatureKind::NumericZscore, FieldId::Timestamp, nullptr},
        {"from", FeatureKind::CategoricalVocab, FieldId::FromB, nullptr},
        {"to", FeatureKind::CategoricalVocab, FieldId::ToB, nullptr},
        {"value", FeatureKind::NumericZscore, FieldId::ValueB, nullptr},
        {"contract_address", FeatureKind::CategoricalVocab, FieldId::ContractAddress, nullptr},
        {"input_len", FeatureKind::HexDerived, FieldId::InputLenB, "byte_length"},
        {"input_prefix", FeatureKind::HexDerived, FieldId::InputPrefixB, "prefix_u32"},
    };
    static const std::vector<FeatureDef> multi = {
        {"nonce", FeatureKind::NumericZscore, FieldId::Nonce, nullptr},
        {"transaction_index", FeatureKind::NumericZscore, FieldId::TransactionIndex, nullptr},
        {"from_address", FeatureKind::CategoricalVocab, FieldId::FromM, nullptr},
        {"to_address", FeatureKind::CategoricalVocab, FieldId::ToM, nullptr},
        {"value", FeatureKind::NumericZscore, FieldId::ValueM, nullptr},
        {"gas", FeatureKind::NumericZscore, FieldId::Gas, nullptr},
        {"gas_price", FeatureKind::NumericZscore, FieldId::GasPrice, nullptr},
        {"input_len", FeatureKind::HexDerived, FieldId::InputLenM, "byte_length"},
        {"input_prefix", FeatureKind::HexDerived, FieldId::InputPrefixM, "prefix_u32"},
        {"receipt_cumulative_gas_used", FeatureKind::NumericZscore, FieldId::ReceiptCumulativeGasUsed, nullptr},
        {"receipt_gas_used", FeatureKind::NumericZscore, FieldId::ReceiptGasUsed, nullptr},
        {"block_timestamp", FeatureKind::NumericZscore, FieldId::BlockTimestamp, nullptr},
        {"block_number", FeatureKind::NumericZscore, FieldId::BlockNumber, nullptr},
        {"from_scam", FeatureKind::Passthrough, FieldId::FromScam, nullptr},
        {"to_scam", FeatureKind::Passthrough, FieldId::ToScam, nullptr},
        {"from_category", FeatureKind::CategoricalVocab, FieldId::FromCategory, nullptr},
        {"to_category", FeatureKind::CategoricalVocab, FieldId::ToCategory, nullptr},
        {"combined_category", FeatureKind::CategoricalVocab, FieldId::CombinedCategory, nullptr},
    };
    return schema == Schema::Binary ? binary : multi;
}

double raw_numeric(const DatasetHandle& d, FieldId field, std::size_t row) {
    switch (field) {
        case FieldId::BlockHeight: return static_cast<double>(d.binary_rows[row].block_height);
        case FieldId::Timestamp: return static_cast<double>(d.binary_rows[row].timestamp);
        case FieldId::ValueB: return d.binary_rows[row].value;
        case FieldId::InputLenB:
            return static_cast<double>(hex_byte_length(d.binary_rows[row].input.value_or("0x")));
        case FieldId::InputPrefixB:
            return static_cast<double>(hex_prefix_value(d.binary_rows[row].input.value_or("0x")));
        case FieldId::Nonce: return static_cast<double>(d.multi_rows[row].nonce);
        case FieldId::TransactionIndex: return static_cast<double>(d.multi_rows[row].transaction_index);
        case FieldId::ValueM: return d.multi_rows[row].value;
        case FieldId::Gas: return static_cast<double>(d.multi_rows[row].gas);
        case FieldId::GasPrice: return static_cast<double>(d.multi_rows[row].gas_price);
        case FieldId::InputLenM: return static_cast<double>(d.multi_rows[row].input_len);
        case FieldId::InputPrefixM: return static_cast<double>(d.multi_rows[row].input_prefix);
        case FieldId::ReceiptCumulativeGasUsed:
            return static_cast<double>(d.multi_rows[row].receipt_cumulative_gas_used);
        case FieldId::ReceiptGasUsed: return static_cast<double>(d.multi_rows[row].receipt_gas_used);
        case FieldId::BlockTimestamp: return static_cast<double>(d.multi_rows[row].block_timestamp);
        case FieldId::BlockNumber: return static_cast<double>(d.multi_rows[row].block_number);
        case FieldId::FromScam: return static_cast<double>(d.multi_rows[row].from_scam);
        case FieldId::ToScam: return static_cast<double>(d.multi_rows[row].to_scam);
        default: throw SchemaMismatchError("field is not numeric");
    }
}

const std::string& raw_token(const DatasetHandle& d, FieldId field, std::size_t row) {
    static const std::string empty;
    switch (field) {
        case FieldId::FromB: return d.binary_rows[row].from_addr;
        case FieldId::ToB: return d.binary_rows[row].to_addr ? *d.binary_rows[row].to_addr : empty;
        case FieldId::ContractAddress:
            return d.binary_rows[row].contract_address ? *d.binary_rows[row].contract_address : empty;
        case FieldId::FromM: return d.multi_rows[row].from_address;
        case FieldId::ToM: return d.multi_rows[row].to_address ? *d.multi_rows[row].to_address : empty;
        case FieldId::FromCategory: return d.multi_rows[row].from_category;
        case FieldId::ToCategory: return d.multi_rows[row].to_category;
        case FieldId::CombinedCategory: return d.multi_rows[row].combined_category;
        default: throw SchemaMismatchError("field is not categorical");
    }
}

void require_encodable(const FeatureCodec& codec, const DatasetHandle& rows) {
    if (codec.schema != rows.schema)
        throw SchemaMismatchError("codec schema does not match row schema");
    if (!rows.imputed) throw SchemaMismatchError("rows must be imputed before encoding");
    if (rows.schema == Schema::Multi && !rows.engineered)
        throw SchemaMismatchError("multi-schema rows must be engineered before encoding");
}

Matrix encode_rows(const FeatureCodec& codec, const DatasetHandle& rows) {
    const auto& defs = feature_defs(codec.schema);
    Matrix out(rows.size(), codec.n_features());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t f = 0; f < defs.size(); ++f) {
            const auto& feat = codec.features[f];
            double v = 0.0;
            if (feat.kind == FeatureKind::CategoricalVocab) {
                const auto& token = raw_token(rows, defs[f].field, r);
                const auto it = feat.vocab.find(token);
                v = static_cast<double>(it != feat.vocab.end() ? it->second : feat.unseen_id());
            } else {
                v = codec.encode_value(feat, raw_numeric(rows, defs[f].field, r));
            }
            if (!std::isfinite(v))
                throw SchemaMismatchError("non-finite encoded value in feature " + feat.name);
            out.at(r, f) = v;
        }
    }
    return out;
}

}  // namespace

std::vector<std::string> FeatureCodec::feature_names() const {
    std::vector<std::string> names;
    names.reserve(features.size());
    for (const auto& f : features) names.push_back(f.name);
    return names;
}

int FeatureCodec::feature_index(const std::string& name) const {
    for (std::size_t i = 0; i < features.size(); ++i)
        if (features[i].name == name) return static_cast<int>(i);
    return -1;
}

double FeatureCodec::encode_value(const Feature& f, double raw) const {
    switch (f.kind) {
        case FeatureKind::NumericZscore:
        case FeatureKind::HexDerived:
            return (raw - f.mean) / f.sigma;
        case FeatureKind::Passthrough:
            return raw;
        case FeatureKind::CategoricalVocab:
            throw SchemaMismatchError("categorical feature " + f.name + " has no numeric encoding");
    }
    return raw;
}

double FeatureCodec::raw_std(const std::string& feature_name) const {
    const int idx = feature_index(feature_name);
    if (idx < 0) throw SchemaMismatchError("unknown feature '" + feature_name + "'");
    return features[static_cast<std::size_t>(idx)].sigma;
}

bool FeatureCodec::operator==(const FeatureCodec& o) const {
    if (schema != o.schema || features.size() != o.features.size()) return false;
    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto& a = features[i];
        const auto& b = o.features[i];
        if (a.name != b.name || a.kind != b.kind || a.mean != b.mean || a.sigma != b.sigma ||
            a.train_min != b.train_min || a.train_max != b.train_max || a.tokens != b.tokens ||
            a.hex_rule != b.hex_rule)
            return false;
    }
    return true;
}

std::vector<std::size_t> EncodedDataset::train_indices() const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < split.size(); ++i)
        if (split[i] == 0) idx.push_back(i);
    return idx;
}

std::vector<std::size_t> EncodedDataset::test_indices() const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < split.size(); ++i)
        if (split[i] == 1) idx.push_back(i);
    return idx;
}

std::vector<int> EncodedDataset::labels_at(const std::vector<std::size_t>& idx) const {
    std::vector<int> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(labels[i]);
    return out;
}

DatasetHandle impute(const DatasetHandle& dataset) {
    DatasetHandle out = dataset;
    if (out.schema == Schema::Binary) {
        for (auto& r : out.binary_rows) {
            if (!r.to_addr) r.to_addr = "Unknown";
            if (!r.contract_address) r.contract_address = "Unknown";
            if (!r.input) r.input = "0x";
        }
    } else {
        for (auto& r : out.multi_rows) {
            if (!r.to_address) r.to_address = "Unknown";
            if (!r.input) r.input = "0x";
        }
    }
    out.imputed = true;
    return out;
}

std::string combine_categories(const std::string& from_category, const std::string& to_category) {
    return from_category + "\xE2\x86\x92" + to_category;  // arrow joins the ordered pair
}

DatasetHandle engineer_features(const DatasetHandle& dataset) {
    if (dataset.schema != Schema::Multi)
        throw WrongSchemaError("engineer_features requires the multi schema");
    DatasetHandle out = dataset;
    for (auto& r : out.multi_rows) {
        r.combined_category = combine_categories(r.from_category, r.to_category);
        const std::string& payload = r.input ? *r.input : std::string("0x");
        r.input_len = hex_byte_length(payload);
        r.input_prefix = hex_prefix_value(payload);
    }
    out.engineered = true;
    return out;
}

EncodedDataset fit_transform(const DatasetHandle& dataset, std::uint64_t split_seed) {
    if (!dataset.imputed) throw PreconditionError("fit_transform requires an imputed dataset");
    if (dataset.schema == Schema::Multi && !dataset.engineered)
        throw PreconditionError("fit_transform requires an engineered multi dataset");
    if (dataset.class_counts.size() < 2)
        throw SingleClassDatasetError("dataset holds a single class; training is impossible");

    const std::size_t n = dataset.size();

    // Stratified split. Classes with < 2 rows are pinned to train; the
    // remaining test quota is apportioned by largest remainder so the
    // overall fraction stays within one row of 20%.
    std::vector<std::vector<std::size_t>> per_class;
    std::vector<int> class_of_bucket;
    for (const auto& [label, count] : dataset.class_counts) {
        (void)count;
        class_of_bucket.push_back(label);
        per_class.emplace_back();
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto bucket = static_cast<std::size_t>(
            std::distance(class_of_bucket.begin(),
                          std::find(class_of_bucket.begin(), class_of_bucket.end(), dataset.labels[i])));
        per_class[bucket].push_back(i);
    }
    for (std::size_t b = 0; b < per_class.size(); ++b) {
        Rng rng(split_seed ^ (0x5eedULL + static_cast<std::uint64_t>(class_of_bucket[b]) * 0x9e37ULL));
        rng.shuffle(per_class[b]);
    }

    const auto target_test = static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(n)));
    std::vector<std::size_t> quota(per_class.size(), 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t b = 0; b < per_class.size(); ++b) {
        if (per_class[b].size() < 2) continue;  // pinned to train
        const double exact = 0.2 * static_cast<double>(per_class[b].size());
        quota[b] = static_cast<std::size_t>(exact);
        assigned += quota[b];
        remainders.push_back({exact - std::floor(exact), b});
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (const auto& [frac, b] : remainders) {
        (void)frac;
        if (assigned >= target_test) break;
        if (quota[b] + 1 <= per_class[b].size() - 1) {
            ++quota[b];
            ++assigned;
        }
    }

    EncodedDataset enc;
    enc.split.assign(n, 0);
    for (std::size_t b = 0; b < per_class.size(); ++b) {
        for (std::size_t i = 0; i < quota[b]; ++i) enc.split[per_class[b][i]] = 1;
    }

    // Fit the codec on train rows only.
    FeatureCodec codec;
    codec.schema = dataset.schema;
    const auto& defs = feature_defs(dataset.schema);
    std::vector<std::size_t> train_rows;
    for (std::size_t i = 0; i < n; ++i)
        if (enc.split[i] == 0) train_rows.push_back(i);

    for (const auto& def : defs) {
        FeatureCodec::Feature feat;
        feat.name = def.name;
        feat.kind = def.kind;
        if (def.hex_rule) feat.hex_rule = def.hex_rule;

        if (def.kind == FeatureKind::CategoricalVocab) {
            for (std::size_t r : train_rows) {
                const auto& token = raw_token(dataset, def.field, r);
                if (feat.vocab.emplace(token, static_cast<int>(feat.tokens.size())).second)
                    feat.tokens.push_back(token);
            }
            feat.train_min = 0.0;
            feat.train_max = static_cast<double>(feat.tokens.size());
        } else {
            double sum = 0.0;
            for (std::size_t r : train_rows) sum += raw_numeric(dataset, def.field, r);
            const double mean = sum / static_cast<double>(train_rows.size());
            double sq = 0.0;
            for (std::size_t r : train_rows) {
                const double d = raw_numeric(dataset, def.field, r) - mean;
                sq += d * d;
            }
            const double sigma = std::sqrt(sq / static_cast<double>(train_rows.size()));
            if (def.kind != FeatureKind::Passthrough) {
                feat.mean = mean;
                feat.sigma = std::max(sigma, FeatureCodec::kSigmaFloor);
            }
            double lo = std::numeric_limits<double>::infinity();
            double hi = -std::numeric_limits<double>::infinity();
            for (std::size_t r : train_rows) {
                const double v = codec.encode_value(feat, raw_numeric(dataset, def.field, r));
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            feat.train_min = lo;
            feat.train_max = hi;
        }
        codec.features.push_back(std::move(feat));
    }

    enc.codec = std::move(codec);
    enc.feature_names = enc.codec.feature_names();
    enc.labels = dataset.labels;
    enc.class_names = dataset.class_names();
    enc.matrix = encode_rows(enc.codec, dataset);
    return enc;
}

Matrix transform_rows(const FeatureCodec& codec, const DatasetHandle& rows) {
    require_encodable(codec, rows);
    return encode_rows(codec, rows);
}

}  // namespace txadv

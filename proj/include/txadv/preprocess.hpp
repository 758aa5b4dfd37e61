#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "txadv/dataset.hpp"
#include "txadv/matrix.hpp"

namespace txadv {

enum class FeatureKind { NumericZscore, CategoricalVocab, HexDerived, Passthrough };

// Per-feature reversible encoding, fit on the training split only.
struct FeatureCodec {
    struct Feature {
        std::string name;
        FeatureKind kind = FeatureKind::NumericZscore;
        // numeric / hex-derived (statistics of the raw column)
        double mean = 0.0;
        double sigma = 1.0;  // clamped to >= kSigmaFloor
        // encoded-space bounds of the training column, used as clip range
        double train_min = 0.0;
        double train_max = 0.0;
        // categorical
        std::unordered_map<std::string, int> vocab;  // token -> dense id
        std::vector<std::string> tokens;             // id -> token
        // hex-derived
        std::string hex_rule;

        int unseen_id() const { return static_cast<int>(tokens.size()); }
    };

    static constexpr double kSigmaFloor = 1e-12;

    Schema schema = Schema::Binary;
    std::vector<Feature> features;

    std::size_t n_features() const { return features.size(); }
    std::vector<std::string> feature_names() const;
    int feature_index(const std::string& name) const;  // -1 when absent

    double encode_value(const Feature& f, double raw) const;
    double raw_std(const std::string& feature_name) const;

    bool operator==(const FeatureCodec&) const;
};

struct EncodedDataset {
    Matrix matrix;
    std::vector<int> labels;
    std::vector<std::string> feature_names;
    FeatureCodec codec;
    std::vector<std::uint8_t> split;  // 0 = train, 1 = test
    std::vector<std::string> class_names;

    std::size_t n_classes() const { return class_names.size(); }
    std::vector<std::size_t> train_indices() const;
    std::vector<std::size_t> test_indices() const;
    Matrix train_matrix() const { return matrix.select_rows(train_indices()); }
    Matrix test_matrix() const { return matrix.select_rows(test_indices()); }
    std::vector<int> labels_at(const std::vector<std::size_t>& idx) const;
};

// Fills missing to_address with "Unknown", missing input with "0x" and
// missing contract_address with "Unknown". Total function.
DatasetHandle impute(const DatasetHandle& dataset);

// Multi schema only: materializes combined_category and the two numeric
// features derived from the hex input payload.
DatasetHandle engineer_features(const DatasetHandle& dataset);

std::string combine_categories(const std::string& from_category, const std::string& to_category);

// Stratified 80/20 split (classes with < 2 rows go entirely to train),
// z-scores numerics with train statistics, vocab-encodes categoricals.
EncodedDataset fit_transform(const DatasetHandle& dataset, std::uint64_t split_seed);

// Re-encodes arbitrary rows with a previously fit codec. Unseen
// categorical tokens map to the reserved id.
Matrix transform_rows(const FeatureCodec& codec, const DatasetHandle& rows);

// JSON round-trip so attacked datasets can be re-encoded in later runs.
std::string codec_to_json(const FeatureCodec& codec);
FeatureCodec codec_from_json(const std::string& text);

}  // namespace txadv

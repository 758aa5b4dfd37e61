#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "txadv/errors.hpp"

namespace txadv {

enum class Schema { Binary, Multi };

std::string schema_name(Schema s);
Schema schema_from_name(const std::string& name);

// One row of the binary (phishing vs benign) transaction schema.
struct BinaryTxRecord {
    std::string tx_hash;
    std::uint64_t block_height = 0;
    std::int64_t timestamp = 0;
    std::string from_addr;
    std::optional<std::string> to_addr;
    double value = 0.0;
    std::optional<std::string> contract_address;
    std::optional<std::string> input;
    int class_label = 0;  // 0 benign, 1 phishing

    bool operator==(const BinaryTxRecord&) const = default;
};

// One row of the multi-class (Benign/Phishing/Scamming/Fake ICO) schema.
struct MultiTxRecord {
    std::string hash;
    std::uint64_t nonce = 0;
    std::uint64_t transaction_index = 0;
    std::string from_address;
    std::optional<std::string> to_address;
    double value = 0.0;
    std::uint64_t gas = 0;
    std::uint64_t gas_price = 0;
    std::optional<std::string> input;
    std::uint64_t receipt_cumulative_gas_used = 0;
    std::uint64_t receipt_gas_used = 0;
    std::int64_t block_timestamp = 0;
    std::uint64_t block_number = 0;
    std::string block_hash;
    int from_scam = 0;
    int to_scam = 0;
    std::string from_category = "Benign";
    std::string to_category = "Benign";

    // Populated by preprocess::engineer_features.
    std::string combined_category;
    std::uint64_t input_len = 0;
    std::uint64_t input_prefix = 0;

    bool operator==(const MultiTxRecord&) const = default;
};

constexpr int kBenign = 0;
constexpr int kPhishing = 1;
constexpr int kScamming = 2;
constexpr int kFakeIco = 3;

const std::vector<std::string>& class_names_for(Schema schema);
int class_id_from_name(Schema schema, const std::string& name);

// The multi schema carries no single class column; the loader labels a
// transaction by the flagged party, receiver first.
int derive_multi_label(const MultiTxRecord& rec);

// Immutable after construction; row order is stable so attacks can
// reference rows by index.
struct DatasetHandle {
    Schema schema = Schema::Binary;
    std::vector<BinaryTxRecord> binary_rows;
    std::vector<MultiTxRecord> multi_rows;
    std::vector<int> labels;  // one entry per row
    std::map<int, std::size_t> class_counts;
    std::string provenance;
    bool imputed = false;
    bool engineered = false;

    std::size_t size() const {
        return schema == Schema::Binary ? binary_rows.size() : multi_rows.size();
    }
    const std::vector<std::string>& class_names() const { return class_names_for(schema); }

    void recount_classes();

    bool operator==(const DatasetHandle&) const = default;
};

DatasetHandle load_csv(const std::string& path, Schema schema);
DatasetHandle load_csv_text(std::string_view text, Schema schema, const std::string& provenance);

std::string to_csv_text(const DatasetHandle& dataset);
void save_csv(const DatasetHandle& dataset, const std::string& path);

const std::vector<std::string>& csv_columns(Schema schema);

// Deterministic synthetic data generator. class_mix maps class name (or
// numeric id as string) to a fraction; fractions must sum to 1 +- 1e-9.
// separability in [0,1] scales every class-conditional signal: 0 produces
// label-independent features, 1 produces well-separated classes.
DatasetHandle synthesize(Schema schema, std::size_t n_rows,
                         const std::map<std::string, double>& class_mix,
                         double separability, std::uint64_t seed);

}  // namespace txadv

#include "txadv/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "txadv/csv.hpp"

namespace txadv {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

const std::vector<std::string> kBinaryColumns = {
    "TxHash", "BlockHeight", "TimeStamp", "From", "To",
    "Value",  "ContractAddress", "Input", "Class"};

const std::vector<std::string> kMultiColumns = {
    "hash", "nonce", "transaction_index", "from_address", "to_address", "value",
    "gas",  "gas_price", "input", "receipt_cumulative_gas_used", "receipt_gas_used",
    "block_timestamp", "block_number", "block_hash", "from_scam", "to_scam",
    "from_category", "to_category"};

const std::vector<std::string> kBinaryClassNames = {"Benign", "Phishing"};
const std::vector<std::string> kMultiClassNames = {"Benign", "Phishing", "Scamming", "Fake ICO"};

// Maps header position -> canonical column index, case-insensitively.
std::vector<std::size_t> match_header(const std::vector<std::string>& header,
                                      const std::vector<std::string>& columns) {
    std::unordered_map<std::string, std::size_t> canon;
    for (std::size_t i = 0; i < columns.size(); ++i) canon[lower(columns[i])] = i;

    std::vector<std::size_t> mapping;
    std::vector<bool> seen(columns.size(), false);
    for (const auto& h : header) {
        const auto it = canon.find(lower(h));
        if (it == canon.end()) throw UnknownColumnError(h);
        mapping.push_back(it->second);
        seen[it->second] = true;
    }
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (!seen[i]) throw MissingColumnError(columns[i]);
    }
    return mapping;
}

std::optional<std::string> optional_field(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return s;
}

double require_double(const std::string& s, std::size_t row, const std::string& col) {
    const auto v = parse_double(s);
    if (!v) throw RowParseError(row, col, "not a number: '" + s + "'");
    if (*v < 0.0) throw RowParseError(row, col, "negative value");
    return *v;
}

std::uint64_t require_u64(const std::string& s, std::size_t row, const std::string& col) {
    const auto v = parse_u64(s);
    if (!v) throw RowParseError(row, col, "not a non-negative integer: '" + s + "'");
    return *v;
}

std::int64_t require_i64_nonneg(const std::string& s, std::size_t row, const std::string& col) {
    const auto v = parse_i64(s);
    if (!v || *v < 0) throw RowParseError(row, col, "not a non-negative integer: '" + s + "'");
    return *v;
}

int require_flag(const std::string& s, std::size_t row, const std::string& col) {
    if (s == "0") return 0;
    if (s == "1") return 1;
    throw RowParseError(row, col, "flag must be 0 or 1, got '" + s + "'");
}

std::string require_category(const std::string& s, std::size_t row, const std::string& col) {
    for (const auto& name : kMultiClassNames) {
        if (lower(s) == lower(name)) return name;
    }
    throw RowParseError(row, col, "unknown category '" + s + "'");
}

BinaryTxRecord parse_binary_row(const std::vector<std::string>& cells,
                                const std::vector<std::size_t>& mapping, std::size_t row) {
    std::vector<std::string> by_col(kBinaryColumns.size());
    for (std::size_t i = 0; i < cells.size(); ++i) by_col[mapping[i]] = cells[i];

    BinaryTxRecord rec;
    rec.tx_hash = by_col[0];
    if (rec.tx_hash.empty()) throw RowParseError(row, "TxHash", "must be non-empty");
    rec.block_height = require_u64(by_col[1], row, "BlockHeight");
    rec.timestamp = require_i64_nonneg(by_col[2], row, "TimeStamp");
    rec.from_addr = by_col[3];
    rec.to_addr = optional_field(by_col[4]);
    rec.value = require_double(by_col[5], row, "Value");
    rec.contract_address = optional_field(by_col[6]);
    rec.input = optional_field(by_col[7]);
    const auto cls = parse_i64(by_col[8]);
    if (!cls || (*cls != 0 && *cls != 1))
        throw RowParseError(row, "Class", "class must be 0 or 1, got '" + by_col[8] + "'");
    rec.class_label = static_cast<int>(*cls);
    return rec;
}

MultiTxRecord parse_multi_row(const std::vector<std::string>& cells,
                              const std::vector<std::size_t>& mapping, std::size_t row) {
    std::vector<std::string> by_col(kMultiColumns.size());
    for (std::size_t i = 0; i < cells.size(); ++i) by_col[mapping[i]] = cells[i];

    MultiTxRecord rec;
    rec.hash = by_col[0];
    if (rec.hash.empty()) throw RowParseError(row, "hash", "must be non-empty");
    rec.nonce = require_u64(by_col[1], row, "nonce");
    rec.transaction_index = require_u64(by_col[2], row, "transaction_index");
    rec.from_address = by_col[3];
    rec.to_address = optional_field(by_col[4]);
    rec.value = require_double(by_col[5], row, "value");
    rec.gas = require_u64(by_col[6], row, "gas");
    rec.gas_price = require_u64(by_col[7], row, "gas_price");
    rec.input = optional_field(by_col[8]);
    rec.receipt_cumulative_gas_used = require_u64(by_col[9], row, "receipt_cumulative_gas_used");
    rec.receipt_gas_used = require_u64(by_col[10], row, "receipt_gas_used");
    if (rec.receipt_gas_used > rec.receipt_cumulative_gas_used)
        throw RowParseError(row, "receipt_gas_used", "exceeds receipt_cumulative_gas_used");
    rec.block_timestamp = require_i64_nonneg(by_col[11], row, "block_timestamp");
    rec.block_number = require_u64(by_col[12], row, "block_number");
    rec.block_hash = by_col[13];
    rec.from_scam = require_flag(by_col[14], row, "from_scam");
    rec.to_scam = require_flag(by_col[15], row, "to_scam");
    rec.from_category = require_category(by_col[16], row, "from_category");
    rec.to_category = require_category(by_col[17], row, "to_category");
    return rec;
}

std::string opt_str(const std::optional<std::string>& v) { return v ? *v : std::string(); }

}  // namespace

std::string schema_name(Schema s) { return s == Schema::Binary ? "binary" : "multi"; }

Schema schema_from_name(const std::string& name) {
    const auto n = lower(name);
    if (n == "binary") return Schema::Binary;
    if (n == "multi") return Schema::Multi;
    throw ConfigError("unknown schema '" + name + "' (expected 'binary' or 'multi')");
}

const std::vector<std::string>& class_names_for(Schema schema) {
    return schema == Schema::Binary ? kBinaryClassNames : kMultiClassNames;
}

int class_id_from_name(Schema schema, const std::string& name) {
    const auto& names = class_names_for(schema);
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (lower(names[i]) == lower(name)) return static_cast<int>(i);
    }
    // allow numeric ids rendered as strings
    if (const auto v = parse_i64(name); v && *v >= 0 && *v < static_cast<std::int64_t>(names.size()))
        return static_cast<int>(*v);
    throw ConfigError("unknown class name '" + name + "' for schema " + schema_name(schema));
}

int derive_multi_label(const MultiTxRecord& rec) {
    if (rec.to_scam == 1) return class_id_from_name(Schema::Multi, rec.to_category);
    if (rec.from_scam == 1) return class_id_from_name(Schema::Multi, rec.from_category);
    return kBenign;
}

void DatasetHandle::recount_classes() {
    class_counts.clear();
    for (int label : labels) ++class_counts[label];
}

const std::vector<std::string>& csv_columns(Schema schema) {
    return schema == Schema::Binary ? kBinaryColumns : kMultiColumns;
}

DatasetHandle load_csv_text(std::string_view text, Schema schema, const std::string& provenance) {
    const auto rows = parse_csv(text);
    if (rows.empty()) throw EmptyDatasetError("no header row in " + provenance);

    const auto& columns = csv_columns(schema);
    const auto mapping = match_header(rows[0], columns);

    DatasetHandle handle;
    handle.schema = schema;
    handle.provenance = provenance;

    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& cells = rows[r];
        if (cells.size() == 1 && cells[0].empty()) continue;  // blank line
        if (cells.size() != mapping.size())
            throw RowParseError(r, "", "expected " + std::to_string(mapping.size()) +
                                           " cells, got " + std::to_string(cells.size()));
        if (schema == Schema::Binary) {
            auto rec = parse_binary_row(cells, mapping, r);
            handle.labels.push_back(rec.class_label);
            handle.binary_rows.push_back(std::move(rec));
        } else {
            auto rec = parse_multi_row(cells, mapping, r);
            handle.labels.push_back(derive_multi_label(rec));
            handle.multi_rows.push_back(std::move(rec));
        }
    }
    if (handle.size() == 0) throw EmptyDatasetError("no data rows in " + provenance);
    handle.recount_classes();
    return handle;
}

DatasetHandle load_csv(const std::string& path, Schema schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_csv_text(buf.str(), schema, path);
}

std::string to_csv_text(const DatasetHandle& dataset) {
    std::string out = csv_join(csv_columns(dataset.schema));
    if (dataset.schema == Schema::Binary) {
        for (const auto& r : dataset.binary_rows) {
            out += csv_join({r.tx_hash, std::to_string(r.block_height), std::to_string(r.timestamp),
                             r.from_addr, opt_str(r.to_addr), format_double(r.value),
                             opt_str(r.contract_address), opt_str(r.input),
                             std::to_string(r.class_label)});
        }
    } else {
        for (const auto& r : dataset.multi_rows) {
            out += csv_join({r.hash, std::to_string(r.nonce), std::to_string(r.transaction_index),
                             r.from_address, opt_str(r.to_address), format_double(r.value),
                             std::to_string(r.gas), std::to_string(r.gas_price), opt_str(r.input),
                             std::to_string(r.receipt_cumulative_gas_used),
                             std::to_string(r.receipt_gas_used), std::to_string(r.block_timestamp),
                             std::to_string(r.block_number), r.block_hash,
                             std::to_string(r.from_scam), std::to_string(r.to_scam),
                             r.from_category, r.to_category});
        }
    }
    return out;
}

void save_csv(const DatasetHandle& dataset, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << to_csv_text(dataset);
}

}  // namespace txadv

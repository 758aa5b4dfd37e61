#pragma once

// Shared helpers for the unit and acceptance suites: field-level record
// comparison and the perturbation-isolation check.

#include <algorithm>
#include <string>
#include <vector>

#include "txadv/attacks.hpp"
#include "txadv/dataset.hpp"

namespace txadv::testsupport {

// Names of the record fields that differ between datasets a and b at a
// row, using the canonical feature names the attack module reports.
inline std::vector<std::string> differing_fields(const DatasetHandle& a, const DatasetHandle& b,
                                                 std::size_t row) {
    std::vector<std::string> diff;
    if (a.schema == Schema::Binary) {
        const auto& x = a.binary_rows[row];
        const auto& y = b.binary_rows[row];
        if (x.tx_hash != y.tx_hash) diff.push_back("tx_hash");
        if (x.block_height != y.block_height) diff.push_back("block_height");
        if (x.timestamp != y.timestamp) diff.push_back("timestamp");
        if (x.from_addr != y.from_addr) diff.push_back("from");
        if (x.to_addr != y.to_addr) diff.push_back("to");
        if (x.value != y.value) diff.push_back("value");
        if (x.contract_address != y.contract_address) diff.push_back("contract_address");
        if (x.input != y.input) diff.push_back("input");
        if (x.class_label != y.class_label) diff.push_back("class");
    } else {
        const auto& x = a.multi_rows[row];
        const auto& y = b.multi_rows[row];
        if (x.hash != y.hash) diff.push_back("hash");
        if (x.nonce != y.nonce) diff.push_back("nonce");
        if (x.transaction_index != y.transaction_index) diff.push_back("transaction_index");
        if (x.from_address != y.from_address) diff.push_back("from_address");
        if (x.to_address != y.to_address) diff.push_back("to_address");
        if (x.value != y.value) diff.push_back("value");
        if (x.gas != y.gas) diff.push_back("gas");
        if (x.gas_price != y.gas_price) diff.push_back("gas_price");
        if (x.input != y.input || x.input_len != y.input_len || x.input_prefix != y.input_prefix)
            diff.push_back("input");
        if (x.receipt_cumulative_gas_used != y.receipt_cumulative_gas_used)
            diff.push_back("receipt_cumulative_gas_used");
        if (x.receipt_gas_used != y.receipt_gas_used) diff.push_back("receipt_gas_used");
        if (x.block_timestamp != y.block_timestamp) diff.push_back("block_timestamp");
        if (x.block_number != y.block_number) diff.push_back("block_number");
        if (x.block_hash != y.block_hash) diff.push_back("block_hash");
        if (x.from_scam != y.from_scam) diff.push_back("from_scam");
        if (x.to_scam != y.to_scam) diff.push_back("to_scam");
        if (x.from_category != y.from_category) diff.push_back("from_category");
        if (x.to_category != y.to_category) diff.push_back("to_category");
        if (x.combined_category != y.combined_category) diff.push_back("combined_category");
    }
    return diff;
}

struct IsolationCheck {
    bool ok = true;
    std::string detail;
};

// Rows outside touched_rows must be bit-identical; touched rows may only
// differ in the perturbation's own features.
inline IsolationCheck check_isolation(const DatasetHandle& original,
                                      const PerturbationResult& result) {
    IsolationCheck check;
    std::vector<bool> touched(original.size(), false);
    for (std::size_t r : result.touched_rows) touched[r] = true;

    for (std::size_t r = 0; r < original.size(); ++r) {
        const auto diff = differing_fields(original, result.perturbed, r);
        if (!touched[r] && !diff.empty()) {
            check.ok = false;
            check.detail = "untouched row " + std::to_string(r) + " changed field " + diff[0];
            return check;
        }
        for (const auto& field : diff) {
            if (std::find(result.touched_features.begin(), result.touched_features.end(), field) ==
                result.touched_features.end()) {
                check.ok = false;
                check.detail = "row " + std::to_string(r) + " changed undeclared field " + field;
                return check;
            }
        }
    }
    return check;
}

}  // namespace txadv::testsupport

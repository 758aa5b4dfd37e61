#include <algorithm>
#include <cmath>
#include <numeric>

#include "txadv/dataset.hpp"
#include "txadv/hexutil.hpp"
#include "txadv/rng.hpp"

namespace txadv {

namespace {

constexpr std::int64_t kEpochBase = 1'600'000'000;
constexpr std::int64_t kDay = 86'400;

// Exact class counts via largest-remainder apportionment, so generated
// proportions stay within one row of the requested mix.
std::vector<std::size_t> apportion(std::size_t n, const std::vector<double>& fractions) {
    std::vector<std::size_t> counts(fractions.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < fractions.size(); ++i) {
        const double exact = fractions[i] * static_cast<double>(n);
        counts[i] = static_cast<std::size_t>(exact);
        assigned += counts[i];
        remainders.push_back({exact - std::floor(exact), i});
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++counts[remainders[i % remainders.size()].second];
    return counts;
}

struct AddressPools {
    std::vector<std::vector<std::string>> per_class;
    std::vector<std::string> shared;

    std::string draw(Rng& rng, int cls, double link_prob) const {
        if (rng.bernoulli(link_prob)) {
            const auto& pool = per_class[static_cast<std::size_t>(cls)];
            return pool[rng.below(pool.size())];
        }
        return shared[rng.below(shared.size())];
    }
};

AddressPools make_pools(Rng& rng, std::size_t n_classes, std::size_t pool_size) {
    AddressPools pools;
    pools.per_class.resize(n_classes);
    for (auto& pool : pools.per_class)
        for (std::size_t i = 0; i < pool_size; ++i) pool.push_back(random_hex_address(rng));
    for (std::size_t i = 0; i < pool_size; ++i) pools.shared.push_back(random_hex_address(rng));
    return pools;
}

std::optional<std::string> draw_input(Rng& rng) {
    const double u = rng.uniform01();
    if (u < 0.3) return std::nullopt;
    if (u < 0.6) return std::string("0x");
    return random_hex(rng, 2 * (4 + rng.below(17)));  // 4..20 byte payload
}

std::vector<int> label_sequence(Rng& rng, const std::vector<std::size_t>& counts) {
    std::vector<int> labels;
    for (std::size_t c = 0; c < counts.size(); ++c)
        labels.insert(labels.end(), counts[c], static_cast<int>(c));
    rng.shuffle(labels);
    return labels;
}

// Class windows 2 days apart; the window width shrinks as separability
// grows, from full overlap at 0 to disjoint 6 h windows at 1.
std::int64_t draw_timestamp(Rng& rng, int cls, double sep) {
    const double width = 2.0 * kDay * (1.0 - sep) + 21600.0 * sep;
    const double start = static_cast<double>(kEpochBase) + cls * 2.0 * kDay * sep;
    return static_cast<std::int64_t>(std::llround(start + rng.uniform(0.0, width)));
}

}  // namespace

DatasetHandle synthesize(Schema schema, std::size_t n_rows,
                         const std::map<std::string, double>& class_mix,
                         double separability, std::uint64_t seed) {
    if (n_rows < 10) throw TooFewRowsError("n_rows must be >= 10, got " + std::to_string(n_rows));
    if (class_mix.empty()) throw BadClassMixError("class_mix is empty");
    if (separability < 0.0 || separability > 1.0)
        throw BadClassMixError("separability must lie in [0, 1]");

    const auto& names = class_names_for(schema);
    std::vector<double> fractions(names.size(), 0.0);
    double sum = 0.0;
    for (const auto& [name, frac] : class_mix) {
        if (frac < 0.0) throw BadClassMixError("negative fraction for class '" + name + "'");
        fractions[static_cast<std::size_t>(class_id_from_name(schema, name))] = frac;
        sum += frac;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw BadClassMixError("class fractions sum to " + std::to_string(sum) + ", expected 1");

    Rng rng(seed ^ (schema == Schema::Binary ? 0x62696eULL : 0x6d756c7469ULL));
    const auto counts = apportion(n_rows, fractions);
    const auto labels = label_sequence(rng, counts);
    const auto pools = make_pools(rng, names.size(), 40);
    const double g = separability;

    DatasetHandle handle;
    handle.schema = schema;
    handle.labels = labels;
    handle.provenance = "synthetic(schema=" + schema_name(schema) +
                        ",n=" + std::to_string(n_rows) + ",seed=" + std::to_string(seed) + ")";

    if (schema == Schema::Binary) {
        handle.binary_rows.reserve(n_rows);
        for (std::size_t i = 0; i < n_rows; ++i) {
            const int c = labels[i];
            BinaryTxRecord rec;
            rec.tx_hash = random_hex(rng, 64);
            rec.block_height = 15'000'000 + i;
            rec.timestamp = draw_timestamp(rng, c, g);
            rec.from_addr = pools.draw(rng, c, g);
            if (rng.bernoulli(0.05)) {
                rec.to_addr = std::nullopt;
            } else {
                rec.to_addr = pools.draw(rng, c, g);
            }
            rec.value = std::exp(rng.normal(4.0 + 1.2 * g * c, 0.8));
            if (rng.bernoulli(0.3)) rec.contract_address = pools.shared[rng.below(10)];
            rec.input = draw_input(rng);
            rec.class_label = c;
            handle.binary_rows.push_back(std::move(rec));
        }
    } else {
        handle.multi_rows.reserve(n_rows);
        for (std::size_t i = 0; i < n_rows; ++i) {
            const int c = labels[i];
            MultiTxRecord rec;
            rec.hash = random_hex(rng, 64);
            rec.nonce = rng.below(5000);
            rec.transaction_index = rng.below(200);
            rec.from_address = pools.draw(rng, c, g);
            if (rng.bernoulli(0.03)) {
                rec.to_address = std::nullopt;
            } else {
                rec.to_address = pools.draw(rng, c, g);
            }
            rec.value = std::exp(rng.normal(4.0 + 1.2 * g * (c == kPhishing) + 0.4 * g * (c == kScamming), 0.8));
            rec.gas = static_cast<std::uint64_t>(
                std::llround(21000.0 * std::exp(rng.normal(0.5 * g * (c == kScamming), 0.35))));
            rec.gas_price = static_cast<std::uint64_t>(
                std::llround(2e10 * std::exp(rng.normal(0.5 * g * (c == kScamming), 0.5))));
            rec.input = draw_input(rng);
            rec.receipt_gas_used = 21000 + rng.below(rec.gas > 21000 ? rec.gas - 21000 + 1 : 1);
            rec.receipt_cumulative_gas_used = rec.receipt_gas_used + rng.below(5'000'000);
            rec.block_timestamp = draw_timestamp(rng, c, g);
            rec.block_number = 8'000'000 + static_cast<std::uint64_t>(c) * static_cast<std::uint64_t>(200'000 * g) +
                               rng.below(static_cast<std::uint64_t>(200'000 * (1.0 - g)) + 10'000);
            rec.block_hash = random_hex(rng, 64);
            // Category fields stay consistent with the label so exported
            // CSVs reload with identical class assignments.
            if (c != kBenign) {
                rec.to_scam = 1;
                rec.to_category = names[static_cast<std::size_t>(c)];
                if (rng.bernoulli(0.3)) {
                    rec.from_scam = 1;
                    rec.from_category = names[static_cast<std::size_t>(c)];
                }
            }
            handle.multi_rows.push_back(std::move(rec));
        }
    }

    handle.recount_classes();
    return handle;
}

}  // namespace txadv

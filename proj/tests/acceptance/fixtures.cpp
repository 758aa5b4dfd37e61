#include "fixtures.hpp"

#include <cmath>

#include "txadv/hexutil.hpp"
#include "txadv/rng.hpp"

namespace txadv::acceptance {

namespace {

constexpr std::int64_t kEpoch = 1'600'000'000;

std::vector<int> shuffled_labels(Rng& rng, std::size_t n, double benign_fraction) {
    const auto n_benign = static_cast<std::size_t>(std::llround(benign_fraction * n));
    std::vector<int> labels(n, kPhishing);
    for (std::size_t i = 0; i < n_benign; ++i) labels[i] = kBenign;
    rng.shuffle(labels);
    return labels;
}

BinaryTxRecord base_row(std::size_t i) {
    BinaryTxRecord rec;
    rec.tx_hash = "0xrow" + std::to_string(i);
    rec.block_height = 15'000'000 + i;
    rec.input = "0x";
    return rec;
}

}  // namespace

DatasetHandle value_margin_fixture(std::size_t n, std::uint64_t seed) {
    Rng rng(seed ^ 0xa4ULL);
    const double price_point = 1000.0;

    DatasetHandle d;
    d.schema = Schema::Binary;
    d.labels = shuffled_labels(rng, n, 0.55);

    std::vector<std::string> pool;
    for (int i = 0; i < 20; ++i) pool.push_back(random_hex_address(rng));

    for (std::size_t i = 0; i < n; ++i) {
        auto rec = base_row(i);
        rec.timestamp = kEpoch + rng.range(0, 2 * 86400);
        rec.from_addr = pool[rng.below(pool.size())];
        rec.to_addr = pool[rng.below(pool.size())];
        rec.class_label = d.labels[i];
        if (d.labels[i] == kBenign) {
            rec.value = price_point * (1.0 - rng.uniform(1e-5, 0.015));
        } else if (rng.bernoulli(0.6)) {
            rec.value = price_point * (1.0 + rng.uniform(1e-4, 0.015));
        } else {
            rec.value = price_point * rng.uniform(0.3, 0.7);
        }
        d.binary_rows.push_back(std::move(rec));
    }
    d.provenance = "fixture(value_margin,n=" + std::to_string(n) + ")";
    d.recount_classes();
    return d;
}

DatasetHandle address_signal_fixture(std::size_t n, std::uint64_t seed) {
    Rng rng(seed ^ 0xa5ULL);
    const auto n_phishing = static_cast<std::size_t>(std::llround(0.35 * n));

    std::vector<std::string> phishing_pool, benign_pool;
    for (int i = 0; i < 15; ++i) phishing_pool.push_back(random_hex_address(rng));
    for (int i = 0; i < 45; ++i) benign_pool.push_back(random_hex_address(rng));

    DatasetHandle d;
    d.schema = Schema::Binary;
    // Phishing rows first: their addresses take the low vocabulary ids.
    // block_height is drawn independently of the row index, which would
    // otherwise leak the class through the ordered layout.
    for (std::size_t i = 0; i < n; ++i) {
        const int label = i < n_phishing ? kPhishing : kBenign;
        const auto& pool = label == kPhishing ? phishing_pool : benign_pool;
        auto rec = base_row(i);
        rec.block_height = 15'000'000 + rng.below(100'000);
        rec.timestamp = kEpoch + rng.range(0, 86400);
        rec.from_addr = pool[rng.below(pool.size())];
        rec.to_addr = pool[rng.below(pool.size())];
        rec.value = std::max(0.0, rng.normal(label == kPhishing ? 130.0 : 100.0, 30.0));
        rec.class_label = label;
        d.binary_rows.push_back(std::move(rec));
        d.labels.push_back(label);
    }
    d.provenance = "fixture(address_signal,n=" + std::to_string(n) + ")";
    d.recount_classes();
    return d;
}

DatasetHandle defense_fixture(std::size_t n, std::uint64_t seed) {
    Rng rng(seed ^ 0xa6ULL);

    DatasetHandle d;
    d.schema = Schema::Binary;
    d.labels = shuffled_labels(rng, n, 0.6);

    const std::string from_addr = "0x" + std::string(40, 'a');
    const std::string to_addr = "0x" + std::string(40, 'b');

    for (std::size_t i = 0; i < n; ++i) {
        auto rec = base_row(i);
        rec.block_height = 15'000'000;  // constant: no accidental signal
        rec.from_addr = from_addr;
        rec.to_addr = to_addr;
        rec.class_label = d.labels[i];
        if (d.labels[i] == kBenign) {
            rec.timestamp = kEpoch + rng.range(0, 6 * 3600);
            rec.value = std::max(0.0, rng.normal(100.0, 14.0));
        } else {
            rec.timestamp = kEpoch + 86400 + rng.range(0, 6 * 3600);
            rec.value = std::max(0.0, rng.normal(145.0, 16.0));
        }
        d.binary_rows.push_back(std::move(rec));
    }
    d.provenance = "fixture(defense,n=" + std::to_string(n) + ")";
    d.recount_classes();
    return d;
}

double accuracy_of(const TrainedModel& model, const Matrix& rows, const std::vector<int>& labels) {
    const auto preds = model.predict(rows);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) hits += (preds[i] == labels[i]);
    return static_cast<double>(hits) / static_cast<double>(preds.size());
}

}  // namespace txadv::acceptance

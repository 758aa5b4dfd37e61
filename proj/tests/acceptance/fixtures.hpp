#pragma once

// Purpose-built synthetic fixtures for the acceptance criteria. Each one
// concentrates the class signal in the feature family a criterion probes.

#include "txadv/dataset.hpp"
#include "txadv/models.hpp"

namespace txadv::acceptance {

// Binary dataset whose class signal lives in `value`, with an asymmetric
// margin: benign values sit just below a price point, phishing values sit
// just above it or far below it. A systematic +1% shift pushes most benign
// rows across the boundary while zero-mean per-row changes mostly stay.
DatasetHandle value_margin_fixture(std::size_t n, std::uint64_t seed);

// Binary dataset where the from/to addresses carry most of the class
// signal (class-pure pools; value is a weak backup). Phishing rows come
// first so their addresses occupy the low vocabulary ids and the reserved
// unseen id lands beyond the benign range.
DatasetHandle address_signal_fixture(std::size_t n, std::uint64_t seed);

// Binary dataset where the timestamp separates the classes perfectly
// (benign in hour 0-6, phishing in hour 24-30), value is a weaker robust
// fallback, and every other field is constant. A +24 h shift maps benign
// rows exactly onto the phishing window.
DatasetHandle defense_fixture(std::size_t n, std::uint64_t seed);

double accuracy_of(const TrainedModel& model, const Matrix& rows, const std::vector<int>& labels);

}  // namespace txadv::acceptance

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace txadv {

// Dense row-major matrix of doubles. Small on purpose; the pipeline only
// needs row access and element arithmetic.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

    void append_row(std::span<const double> values) {
        data.insert(data.end(), values.begin(), values.end());
        ++rows;
    }

    Matrix select_rows(const std::vector<std::size_t>& idx) const {
        Matrix out(0, cols);
        out.data.reserve(idx.size() * cols);
        for (std::size_t r : idx) out.append_row(row(r));
        return out;
    }

    bool operator==(const Matrix&) const = default;
};

}  // namespace txadv

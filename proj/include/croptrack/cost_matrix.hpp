// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 croptrack contributors

#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace croptrack {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Dense row-major cost matrix. Entries are >= 0; +inf marks a forbidden pair.
class CostMatrix {
public:
    CostMatrix() = default;
    CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

    std::span<const double> row(std::size_t r) const {
        return {values_.data() + r * cols_, cols_};
    }
    std::span<const double> values() const { return values_; }

    static CostMatrix from_rows(const std::vector<std::vector<double>>& rows) {
        const std::size_t ncols = rows.empty() ? 0 : rows.front().size();
        CostMatrix m(rows.size(), ncols);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != ncols) {
                throw std::invalid_argument("CostMatrix::from_rows: ragged rows");
            }
            for (std::size_t c = 0; c < ncols; ++c) {
                m(r, c) = rows[r][c];
            }
        }
        return m;
    }

    friend bool operator==(const CostMatrix&, const CostMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

}  // namespace croptrack

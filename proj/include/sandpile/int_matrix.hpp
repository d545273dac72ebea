#pragma once

#include <cstddef>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "sandpile/gf_matrix.hpp"

namespace sandpile {

using BigInt = boost::multiprecision::cpp_int;

/// Row-major matrix of arbitrary-precision integers.
class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols) {}
    IntMatrix(std::size_t rows, std::size_t cols, std::vector<BigInt> entries);

    static IntMatrix identity(std::size_t n);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] const BigInt& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
    [[nodiscard]] BigInt& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
    [[nodiscard]] const std::vector<BigInt>& entries() const noexcept { return entries_; }

    [[nodiscard]] IntMatrix transpose() const;
    /// Entrywise reduction into [0, p).
    [[nodiscard]] GfMatrix mod(Prime p) const;
    [[nodiscard]] bool rows_sum_to_zero() const;

    friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
    friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<BigInt> entries_;
};

}  // namespace sandpile

#include "sandpile/int_matrix.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace sandpile {

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols, std::vector<BigInt> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows * cols) {
        throw std::invalid_argument("matrix entry count " + std::to_string(entries_.size()) +
                                    " does not match " + std::to_string(rows) + "x" +
                                    std::to_string(cols));
    }
}

IntMatrix IntMatrix::identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::transpose() const {
    IntMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    }
    return t;
}

GfMatrix IntMatrix::mod(Prime p) const {
    const BigInt modulus = p.value();
    std::vector<Residue> out(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        BigInt r = entries_[i] % modulus;
        if (r < 0) r += modulus;
        out[i] = r.convert_to<Residue>();
    }
    return GfMatrix(p, rows_, cols_, std::move(out));
}

bool IntMatrix::rows_sum_to_zero() const {
    for (std::size_t r = 0; r < rows_; ++r) {
        BigInt sum = 0;
        for (std::size_t c = 0; c < cols_; ++c) sum += (*this)(r, c);
        if (sum != 0) return false;
    }
    return true;
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product dimension mismatch");
    IntMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const BigInt& aik = a(i, k);
            if (aik == 0) continue;
            for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
        }
    }
    return out;
}

}  // namespace sandpile

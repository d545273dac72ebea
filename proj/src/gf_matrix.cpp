#include "sandpile/gf_matrix.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>
#include <utility>

namespace sandpile {

bool is_prime(std::uint64_t n) noexcept {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

Prime::Prime(std::uint32_t value) : value_(value) {
    if (value >= kLimit || !is_prime(value)) {
        throw std::invalid_argument("modulus must be a prime below 65536, got " +
                                    std::to_string(value));
    }
}

Residue Prime::reduce(std::int64_t x) const noexcept {
    const auto p = static_cast<std::int64_t>(value_);
    const std::int64_t r = x % p;
    return static_cast<Residue>(r < 0 ? r + p : r);
}

Residue Prime::inverse(Residue a) const {
    if (a % value_ == 0) throw std::domain_error("zero has no inverse mod p");
    // Extended Euclid on (a, p).
    std::int64_t r0 = value_, r1 = a, s0 = 0, s1 = 1;
    while (r1 != 0) {
        const std::int64_t q = r0 / r1;
        r0 = std::exchange(r1, r0 - q * r1);
        s0 = std::exchange(s1, s0 - q * s1);
    }
    return reduce(s0);
}

// ---------------------------------------------------------------------------
// GfVector

namespace {

void check_residues(Prime p, std::span<const Residue> entries) {
    for (Residue e : entries) {
        if (e >= p.value()) {
            throw std::invalid_argument("entry " + std::to_string(e) + " is not a residue mod " +
                                        std::to_string(p.value()));
        }
    }
}

}  // namespace

GfVector::GfVector(Prime p, std::vector<Residue> entries) : p_(p), entries_(std::move(entries)) {
    check_residues(p_, entries_);
}

GfVector GfVector::from_integers(Prime p, std::span<const std::int64_t> values) {
    std::vector<Residue> entries(values.size());
    std::ranges::transform(values, entries.begin(), [p](std::int64_t x) { return p.reduce(x); });
    return GfVector(p, std::move(entries));
}

GfVector GfVector::ones(Prime p, std::size_t size) {
    return GfVector(p, std::vector<Residue>(size, 1));
}

GfVector GfVector::unit(Prime p, std::size_t size, std::size_t index) {
    GfVector v(p, size);
    v.set(index, 1);
    return v;
}

void GfVector::set(std::size_t i, Residue value) {
    if (value >= p_.value()) throw std::invalid_argument("entry is not a residue");
    entries_.at(i) = value;
}

// ---------------------------------------------------------------------------
// GfMatrix

GfMatrix::GfMatrix(Prime p, std::size_t rows, std::size_t cols)
    : p_(p), rows_(rows), cols_(cols), entries_(rows * cols, 0) {}

GfMatrix::GfMatrix(Prime p, std::size_t rows, std::size_t cols, std::vector<Residue> entries)
    : p_(p), rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows * cols) {
        throw std::invalid_argument("matrix entry count " + std::to_string(entries_.size()) +
                                    " does not match " + std::to_string(rows) + "x" +
                                    std::to_string(cols));
    }
    check_residues(p_, entries_);
}

GfMatrix GfMatrix::from_integers(Prime p, std::size_t rows, std::size_t cols,
                                 std::span<const std::int64_t> values) {
    std::vector<Residue> entries(values.size());
    std::ranges::transform(values, entries.begin(), [p](std::int64_t x) { return p.reduce(x); });
    return GfMatrix(p, rows, cols, std::move(entries));
}

GfMatrix GfMatrix::identity(Prime p, std::size_t n) {
    GfMatrix m(p, n, n);
    for (std::size_t i = 0; i < n; ++i) m.entries_[i * n + i] = 1;
    return m;
}

GfMatrix GfMatrix::from_rows(Prime p, std::size_t cols, std::span<const GfVector> rows) {
    std::vector<Residue> entries;
    entries.reserve(rows.size() * cols);
    for (const auto& r : rows) {
        if (r.size() != cols) throw std::invalid_argument("row length mismatch");
        if (r.prime() != p) throw std::invalid_argument("row modulus mismatch");
        entries.insert(entries.end(), r.entries().begin(), r.entries().end());
    }
    return GfMatrix(p, rows.size(), cols, std::move(entries));
}

void GfMatrix::set(std::size_t r, std::size_t c, Residue value) {
    if (r >= rows_ || c >= cols_) throw std::out_of_range("matrix index out of range");
    if (value >= p_.value()) throw std::invalid_argument("entry is not a residue");
    entries_[r * cols_ + c] = value;
}

GfVector GfMatrix::row_vector(std::size_t r) const {
    const auto s = row(r);
    return GfVector(p_, std::vector<Residue>(s.begin(), s.end()));
}

GfMatrix GfMatrix::transpose() const {
    GfMatrix t(p_, cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) t.entries_[c * rows_ + r] = entries_[r * cols_ + c];
    }
    return t;
}

GfVector GfMatrix::apply(const GfVector& v) const {
    if (v.size() != cols_) throw std::invalid_argument("vector length does not match columns");
    std::vector<Residue> out(rows_, 0);
    const std::uint64_t p = p_.value();
    for (std::size_t r = 0; r < rows_; ++r) {
        std::uint64_t acc = 0;
        for (std::size_t c = 0; c < cols_; ++c) acc = (acc + std::uint64_t{entries_[r * cols_ + c]} * v[c]) % p;
        out[r] = static_cast<Residue>(acc);
    }
    return GfVector(p_, std::move(out));
}

// ---------------------------------------------------------------------------
// Elimination kernels

namespace {

constexpr std::size_t kWordBits = 64;

std::size_t words_for(std::size_t cols) { return (cols + kWordBits - 1) / kWordBits; }

/// Bit-packed rows over GF(2); row r occupies words [r*stride, (r+1)*stride).
struct PackedRows {
    std::size_t rows;
    std::size_t cols;
    std::size_t stride;
    std::vector<std::uint64_t> words;

    explicit PackedRows(const GfMatrix& m)
        : rows(m.rows()), cols(m.cols()), stride(words_for(m.cols())), words(rows * stride, 0) {
        for (std::size_t r = 0; r < rows; ++r) {
            const auto row = m.row(r);
            for (std::size_t c = 0; c < cols; ++c) {
                if (row[c]) words[r * stride + c / kWordBits] |= std::uint64_t{1} << (c % kWordBits);
            }
        }
    }

    std::uint64_t* row(std::size_t r) { return words.data() + r * stride; }
    [[nodiscard]] bool bit(std::size_t r, std::size_t c) const {
        return (words[r * stride + c / kWordBits] >> (c % kWordBits)) & 1u;
    }

    void swap_rows(std::size_t a, std::size_t b) {
        if (a != b) std::swap_ranges(row(a), row(a) + stride, row(b));
    }

    void xor_into(std::size_t dst, std::size_t src, std::size_t from_word) {
        std::uint64_t* d = row(dst);
        const std::uint64_t* s = row(src);
        for (std::size_t w = from_word; w < stride; ++w) d[w] ^= s[w];
    }

    /// Gaussian elimination; pivots are the first nonzero entry in column
    /// order, searched top-down. With `full`, rows above the pivot are also
    /// cleared (reduced echelon form).
    std::vector<std::size_t> eliminate(bool full) {
        std::vector<std::size_t> pivots;
        std::size_t rank = 0;
        for (std::size_t c = 0; c < cols && rank < rows; ++c) {
            std::size_t pivot = rank;
            while (pivot < rows && !bit(pivot, c)) ++pivot;
            if (pivot == rows) continue;
            swap_rows(rank, pivot);
            const std::size_t w = c / kWordBits;
            for (std::size_t r = full ? 0 : rank + 1; r < rows; ++r) {
                if (r != rank && bit(r, c)) xor_into(r, rank, w);
            }
            pivots.push_back(c);
            ++rank;
        }
        return pivots;
    }

    void unpack_into(GfMatrix& m) const {
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) m.set(r, c, bit(r, c) ? 1 : 0);
        }
    }
};

/// Row-major residue storage for odd p.
struct DenseRows {
    Prime p;
    std::size_t rows;
    std::size_t cols;
    std::vector<Residue> a;

    explicit DenseRows(const GfMatrix& m)
        : p(m.prime()), rows(m.rows()), cols(m.cols()), a(m.entries().begin(), m.entries().end()) {}

    Residue* row(std::size_t r) { return a.data() + r * cols; }

    std::vector<std::size_t> eliminate(bool full) {
        std::vector<std::size_t> pivots;
        const Residue pv = p.value();
        std::size_t rank = 0;
        for (std::size_t c = 0; c < cols && rank < rows; ++c) {
            std::size_t pivot = rank;
            while (pivot < rows && a[pivot * cols + c] == 0) ++pivot;
            if (pivot == rows) continue;
            if (pivot != rank) std::swap_ranges(row(rank), row(rank) + cols, row(pivot));
            Residue* prow = row(rank);
            if (prow[c] != 1) {
                const Residue inv = p.inverse(prow[c]);
                for (std::size_t j = c; j < cols; ++j) prow[j] = p.mul(prow[j], inv);
            }
            for (std::size_t r = full ? 0 : rank + 1; r < rows; ++r) {
                Residue* target = row(r);
                if (r == rank || target[c] == 0) continue;
                const Residue f = pv - target[c];
                for (std::size_t j = c; j < cols; ++j) target[j] = (target[j] + f * prow[j]) % pv;
            }
            pivots.push_back(c);
            ++rank;
        }
        return pivots;
    }
};

std::vector<std::size_t> eliminate_copy(GfMatrix& m, bool full) {
    if (m.prime().value() == 2) {
        PackedRows packed(m);
        auto pivots = packed.eliminate(full);
        packed.unpack_into(m);
        return pivots;
    }
    DenseRows dense(m);
    auto pivots = dense.eliminate(full);
    m = GfMatrix(m.prime(), m.rows(), m.cols(), std::move(dense.a));
    return pivots;
}

}  // namespace

RankInfo rank_and_corank(const GfMatrix& m) {
    std::size_t rank = 0;
    if (m.prime().value() == 2) {
        PackedRows packed(m);
        rank = packed.eliminate(false).size();
    } else {
        DenseRows dense(m);
        rank = dense.eliminate(false).size();
    }
    return {rank, m.cols() - rank};
}

std::size_t eliminate_in_place(GfMatrix& m) { return eliminate_copy(m, true).size(); }

EchelonForm reduced_echelon_form(const GfMatrix& m) {
    GfMatrix copy = m;
    auto pivots = eliminate_copy(copy, true);
    return {std::move(copy), std::move(pivots)};
}

std::vector<GfVector> nullspace_basis(const GfMatrix& m) {
    const auto [reduced, pivots] = reduced_echelon_form(m);
    const Prime p = m.prime();
    std::vector<bool> is_pivot(m.cols(), false);
    for (std::size_t c : pivots) is_pivot[c] = true;

    std::vector<GfVector> basis;
    for (std::size_t free = 0; free < m.cols(); ++free) {
        if (is_pivot[free]) continue;
        GfVector v(p, m.cols());
        v.set(free, 1);
        for (std::size_t r = 0; r < pivots.size(); ++r) v.set(pivots[r], p.neg(reduced(r, free)));
        basis.push_back(std::move(v));
    }
    return basis;
}

bool in_row_span(const GfMatrix& m, const GfVector& v) {
    if (v.size() != m.cols()) {
        throw std::invalid_argument("vector length " + std::to_string(v.size()) +
                                    " does not match column count " + std::to_string(m.cols()));
    }
    if (v.prime() != m.prime()) throw std::invalid_argument("vector modulus does not match matrix");
    return RankTracker(m).contains(v);
}

// ---------------------------------------------------------------------------
// RankTracker

RankTracker::RankTracker(Prime p, std::size_t cols)
    : p_(p), cols_(cols), words_per_row_(words_for(cols)) {}

RankTracker::RankTracker(const GfMatrix& initial) : RankTracker(initial.prime(), initial.cols()) {
    for (std::size_t r = 0; r < initial.rows(); ++r) add_row(initial.row(r));
}

void RankTracker::check_width(std::size_t width) const {
    if (width != cols_) {
        throw std::invalid_argument("row length " + std::to_string(width) +
                                    " does not match tracker width " + std::to_string(cols_));
    }
}

// Basis rows are kept with a unit pivot and zeros at the pivots of all
// earlier rows, so a single pass in insertion order reduces a candidate.
bool RankTracker::reduce(std::vector<Residue>& row) const {
    const Residue pv = p_.value();
    for (std::size_t i = 0; i < basis_.size(); ++i) {
        const std::size_t c = pivots_[i];
        if (row[c] == 0) continue;
        const Residue f = pv - row[c];
        const auto& b = basis_[i];
        for (std::size_t j = c; j < cols_; ++j) row[j] = (row[j] + f * b[j]) % pv;
    }
    return std::ranges::all_of(row, [](Residue x) { return x == 0; });
}

bool RankTracker::reduce(std::vector<std::uint64_t>& words) const {
    for (std::size_t i = 0; i < packed_basis_.size(); ++i) {
        const std::size_t c = pivots_[i];
        if (!((words[c / kWordBits] >> (c % kWordBits)) & 1u)) continue;
        const auto& b = packed_basis_[i];
        for (std::size_t w = c / kWordBits; w < words_per_row_; ++w) words[w] ^= b[w];
    }
    return std::ranges::all_of(words, [](std::uint64_t w) { return w == 0; });
}

RankTracker::AddResult RankTracker::add_row(std::span<const Residue> row) {
    check_width(row.size());
    if (p_.value() == 2) {
        std::vector<std::uint64_t> words(words_per_row_, 0);
        for (std::size_t c = 0; c < cols_; ++c) {
            if (row[c] & 1u) words[c / kWordBits] |= std::uint64_t{1} << (c % kWordBits);
        }
        if (reduce(words)) return {true, corank()};
        std::size_t w = 0;
        while (words[w] == 0) ++w;
        pivots_.push_back(w * kWordBits + static_cast<std::size_t>(std::countr_zero(words[w])));
        packed_basis_.push_back(std::move(words));
        return {false, corank()};
    }
    std::vector<Residue> copy(row.begin(), row.end());
    check_residues(p_, copy);
    if (reduce(copy)) return {true, corank()};
    std::size_t c = 0;
    while (copy[c] == 0) ++c;
    if (copy[c] != 1) {
        const Residue inv = p_.inverse(copy[c]);
        for (std::size_t j = c; j < cols_; ++j) copy[j] = p_.mul(copy[j], inv);
    }
    pivots_.push_back(c);
    basis_.push_back(std::move(copy));
    return {false, corank()};
}

RankTracker::AddResult RankTracker::add_row(const GfVector& v) {
    if (v.prime() != p_) throw std::invalid_argument("vector modulus does not match tracker");
    return add_row(v.entries());
}

bool RankTracker::contains(std::span<const Residue> row) const {
    check_width(row.size());
    if (p_.value() == 2) {
        std::vector<std::uint64_t> words(words_per_row_, 0);
        for (std::size_t c = 0; c < cols_; ++c) {
            if (row[c] & 1u) words[c / kWordBits] |= std::uint64_t{1} << (c % kWordBits);
        }
        return reduce(words);
    }
    std::vector<Residue> copy(row.begin(), row.end());
    return reduce(copy);
}

bool RankTracker::contains(const GfVector& v) const {
    if (v.prime() != p_) throw std::invalid_argument("vector modulus does not match tracker");
    return contains(v.entries());
}

}  // namespace sandpile

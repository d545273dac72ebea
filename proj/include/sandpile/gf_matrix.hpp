#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sandpile {

using Residue = std::uint32_t;

/// A prime modulus p with 2 <= p < 2^16, so a product of two residues fits in
/// 32 bits before reduction.
class Prime {
public:
    static constexpr std::uint32_t kLimit = 1u << 16;

    /// Throws std::invalid_argument unless `value` is a prime below kLimit.
    explicit Prime(std::uint32_t value);

    [[nodiscard]] std::uint32_t value() const noexcept { return value_; }
    [[nodiscard]] Residue reduce(std::int64_t x) const noexcept;
    [[nodiscard]] Residue add(Residue a, Residue b) const noexcept {
        const Residue s = a + b;
        return s >= value_ ? s - value_ : s;
    }
    [[nodiscard]] Residue sub(Residue a, Residue b) const noexcept {
        return a >= b ? a - b : a + value_ - b;
    }
    [[nodiscard]] Residue mul(Residue a, Residue b) const noexcept { return (a * b) % value_; }
    [[nodiscard]] Residue neg(Residue a) const noexcept { return a == 0 ? 0 : value_ - a; }
    /// Multiplicative inverse of a nonzero residue.
    [[nodiscard]] Residue inverse(Residue a) const;

    friend bool operator==(const Prime&, const Prime&) = default;

private:
    std::uint32_t value_;
};

[[nodiscard]] bool is_prime(std::uint64_t n) noexcept;

class GfVector {
public:
    GfVector(Prime p, std::size_t size) : p_(p), entries_(size, 0) {}
    /// Entries must already lie in [0, p).
    GfVector(Prime p, std::vector<Residue> entries);
    /// Reduces arbitrary integers into [0, p).
    static GfVector from_integers(Prime p, std::span<const std::int64_t> values);
    static GfVector ones(Prime p, std::size_t size);
    static GfVector unit(Prime p, std::size_t size, std::size_t index);

    [[nodiscard]] Prime prime() const noexcept { return p_; }
    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] Residue operator[](std::size_t i) const { return entries_[i]; }
    void set(std::size_t i, Residue value);
    [[nodiscard]] std::span<const Residue> entries() const noexcept { return entries_; }

    friend bool operator==(const GfVector&, const GfVector&) = default;

private:
    Prime p_;
    std::vector<Residue> entries_;
};

/// Dense row-major matrix over Z/pZ.
class GfMatrix {
public:
    GfMatrix(Prime p, std::size_t rows, std::size_t cols);
    /// Entries must already lie in [0, p); length must equal rows * cols.
    GfMatrix(Prime p, std::size_t rows, std::size_t cols, std::vector<Residue> entries);
    static GfMatrix from_integers(Prime p, std::size_t rows, std::size_t cols,
                                  std::span<const std::int64_t> values);
    static GfMatrix identity(Prime p, std::size_t n);
    static GfMatrix from_rows(Prime p, std::size_t cols, std::span<const GfVector> rows);

    [[nodiscard]] Prime prime() const noexcept { return p_; }
    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] Residue operator()(std::size_t r, std::size_t c) const {
        return entries_[r * cols_ + c];
    }
    void set(std::size_t r, std::size_t c, Residue value);
    [[nodiscard]] std::span<const Residue> row(std::size_t r) const {
        return {entries_.data() + r * cols_, cols_};
    }
    [[nodiscard]] GfVector row_vector(std::size_t r) const;
    [[nodiscard]] std::span<const Residue> entries() const noexcept { return entries_; }

    [[nodiscard]] GfMatrix transpose() const;
    /// Matrix-vector product m * v.
    [[nodiscard]] GfVector apply(const GfVector& v) const;

    friend bool operator==(const GfMatrix&, const GfMatrix&) = default;

private:
    Prime p_;
    std::size_t rows_;
    std::size_t cols_;
    std::vector<Residue> entries_;
};

struct RankInfo {
    std::size_t rank;
    std::size_t corank;  // dimension of the right nullspace, cols - rank

    friend bool operator==(const RankInfo&, const RankInfo&) = default;
};

[[nodiscard]] RankInfo rank_and_corank(const GfMatrix& m);

/// Reduced row echelon form. `pivots[i]` is the pivot column of row i for i < rank.
struct EchelonForm {
    GfMatrix reduced;
    std::vector<std::size_t> pivots;
};

[[nodiscard]] EchelonForm reduced_echelon_form(const GfMatrix& m);

/// Destructive variant: eliminates `m` in place and returns its rank.
std::size_t eliminate_in_place(GfMatrix& m);

/// Basis of {v : m v = 0}, one vector per free column in increasing column
/// order. Each vector has a 1 at its free column and 0 at every other free column.
[[nodiscard]] std::vector<GfVector> nullspace_basis(const GfMatrix& m);

/// True iff v is an F_p-linear combination of the rows of m.
[[nodiscard]] bool in_row_span(const GfMatrix& m, const GfVector& v);

/// Maintains an echelon basis of a growing row space. Single owner; not
/// safe for concurrent mutation.
class RankTracker {
public:
    RankTracker(Prime p, std::size_t cols);
    explicit RankTracker(const GfMatrix& initial);

    struct AddResult {
        bool entered_span;     // the row was already in the span (rank unchanged)
        std::size_t corank;    // cols - rank after the addition
    };

    AddResult add_row(std::span<const Residue> row);
    AddResult add_row(const GfVector& v);
    [[nodiscard]] bool contains(std::span<const Residue> row) const;
    [[nodiscard]] bool contains(const GfVector& v) const;

    [[nodiscard]] Prime prime() const noexcept { return p_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] std::size_t rank() const noexcept { return pivots_.size(); }
    [[nodiscard]] std::size_t corank() const noexcept { return cols_ - pivots_.size(); }

private:
    bool reduce(std::vector<Residue>& row) const;            // general p
    bool reduce(std::vector<std::uint64_t>& words) const;    // p = 2
    void check_width(std::size_t width) const;

    Prime p_;
    std::size_t cols_;
    std::size_t words_per_row_;
    std::vector<std::size_t> pivots_;
    std::vector<std::vector<Residue>> basis_;               // used when p != 2
    std::vector<std::vector<std::uint64_t>> packed_basis_;  // used when p == 2
};

}  // namespace sandpile

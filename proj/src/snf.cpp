#include "sandpile/snf.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <utility>

namespace sandpile {

std::vector<BigInt> InvariantFactors::torsion() const {
    std::vector<BigInt> out;
    std::ranges::copy_if(diag, std::back_inserter(out), [](const BigInt& d) { return d > 1; });
    return out;
}

namespace {

/// Elimination state. Every operation on `a` is mirrored on `u` (rows) or
/// `v` (columns) when transforms are requested, keeping u * m * v == a.
class Reducer {
public:
    Reducer(const IntMatrix& m, bool track)
        : a_(m), track_(track), rows_(m.rows()), cols_(m.cols()) {
        if (track_) {
            u_ = IntMatrix::identity(rows_);
            v_ = IntMatrix::identity(cols_);
        }
    }

    std::size_t run() {
        const std::size_t limit = std::min(rows_, cols_);
        std::size_t t = 0;
        for (; t < limit; ++t) {
            if (!settle_pivot(t)) break;
            if (a_(t, t) < 0) negate_row(t);
        }
        return t;
    }

    IntMatrix& a() { return a_; }
    IntMatrix& u() { return u_; }
    IntMatrix& v() { return v_; }

private:
    std::optional<std::pair<std::size_t, std::size_t>> min_entry(std::size_t t) const {
        std::optional<std::pair<std::size_t, std::size_t>> best;
        BigInt best_abs;
        for (std::size_t i = t; i < rows_; ++i) {
            for (std::size_t j = t; j < cols_; ++j) {
                const BigInt& x = a_(i, j);
                if (x == 0) continue;
                BigInt ax = abs(x);
                if (!best || ax < best_abs) {
                    best = {i, j};
                    best_abs = std::move(ax);
                    if (best_abs == 1) return best;
                }
            }
        }
        return best;
    }

    // Drives a_(t, t) to a pivot that divides everything in the trailing
    // submatrix, with row t and column t cleared. False if the trailing
    // submatrix is zero.
    bool settle_pivot(std::size_t t) {
        for (;;) {
            const auto pos = min_entry(t);
            if (!pos) return false;
            swap_rows(t, pos->first);
            swap_cols(t, pos->second);

            bool cleared = true;
            for (std::size_t i = t + 1; i < rows_; ++i) {
                if (a_(i, t) == 0) continue;
                const BigInt q = a_(i, t) / a_(t, t);
                add_row_multiple(i, t, -q);
                if (a_(i, t) != 0) cleared = false;
            }
            for (std::size_t j = t + 1; j < cols_; ++j) {
                if (a_(t, j) == 0) continue;
                const BigInt q = a_(t, j) / a_(t, t);
                add_col_multiple(j, t, -q);
                if (a_(t, j) != 0) cleared = false;
            }
            if (!cleared) continue;

            const auto offender = non_divisible(t);
            if (!offender) return true;
            add_row_multiple(t, *offender, 1);
        }
    }

    std::optional<std::size_t> non_divisible(std::size_t t) const {
        const BigInt& d = a_(t, t);
        for (std::size_t i = t + 1; i < rows_; ++i) {
            for (std::size_t j = t + 1; j < cols_; ++j) {
                if (a_(i, j) % d != 0) return i;
            }
        }
        return std::nullopt;
    }

    void swap_rows(std::size_t i, std::size_t k) {
        if (i == k) return;
        for (std::size_t j = 0; j < cols_; ++j) std::swap(a_(i, j), a_(k, j));
        if (track_) {
            for (std::size_t j = 0; j < rows_; ++j) std::swap(u_(i, j), u_(k, j));
        }
    }

    void swap_cols(std::size_t j, std::size_t k) {
        if (j == k) return;
        for (std::size_t i = 0; i < rows_; ++i) std::swap(a_(i, j), a_(i, k));
        if (track_) {
            for (std::size_t i = 0; i < cols_; ++i) std::swap(v_(i, j), v_(i, k));
        }
    }

    // row_i += f * row_k
    void add_row_multiple(std::size_t i, std::size_t k, const BigInt& f) {
        for (std::size_t j = 0; j < cols_; ++j) {
            if (a_(k, j) != 0) a_(i, j) += f * a_(k, j);
        }
        if (track_) {
            for (std::size_t j = 0; j < rows_; ++j) {
                if (u_(k, j) != 0) u_(i, j) += f * u_(k, j);
            }
        }
    }

    // col_j += f * col_k
    void add_col_multiple(std::size_t j, std::size_t k, const BigInt& f) {
        for (std::size_t i = 0; i < rows_; ++i) {
            if (a_(i, k) != 0) a_(i, j) += f * a_(i, k);
        }
        if (track_) {
            for (std::size_t i = 0; i < cols_; ++i) {
                if (v_(i, k) != 0) v_(i, j) += f * v_(i, k);
            }
        }
    }

    void negate_row(std::size_t i) {
        for (std::size_t j = 0; j < cols_; ++j) a_(i, j) = -a_(i, j);
        if (track_) {
            for (std::size_t j = 0; j < rows_; ++j) u_(i, j) = -u_(i, j);
        }
    }

    IntMatrix a_;
    IntMatrix u_;
    IntMatrix v_;
    bool track_;
    std::size_t rows_;
    std::size_t cols_;
};

InvariantFactors collect(IntMatrix& reduced, std::size_t rank) {
    InvariantFactors f;
    f.diag.reserve(rank);
    for (std::size_t t = 0; t < rank; ++t) f.diag.push_back(reduced(t, t));
    f.free_rank = reduced.rows() - rank;
    return f;
}

}  // namespace

SmithForm smith_normal_form(const IntMatrix& m) {
    Reducer r(m, true);
    const std::size_t rank = r.run();
    return {collect(r.a(), rank), std::move(r.u()), std::move(r.v())};
}

InvariantFactors invariant_factors(const IntMatrix& m) {
    Reducer r(m, false);
    const std::size_t rank = r.run();
    return collect(r.a(), rank);
}

SandpileGroup sandpile_invariants(const IntMatrix& laplacian) {
    if (laplacian.rows() != laplacian.cols()) {
        throw std::invalid_argument("a Laplacian must be square");
    }
    if (!laplacian.rows_sum_to_zero()) {
        throw std::invalid_argument("not a Laplacian: some row does not sum to zero");
    }
    SandpileGroup g{invariant_factors(laplacian)};
    // Every row sums to zero, so the all-ones vector is in the kernel and the
    // cokernel has free rank at least one (for a nonempty matrix).
    if (g.factors.free_rank > 0) --g.factors.free_rank;
    return g;
}

std::size_t p_rank(const InvariantFactors& f, Prime p) {
    const BigInt modulus = p.value();
    return static_cast<std::size_t>(
        std::ranges::count_if(f.diag, [&](const BigInt& d) { return d % modulus == 0; }));
}

}  // namespace sandpile

#pragma once

// Slow, obviously-correct reference computations shared by the test suites.

#include <algorithm>
#include <cstddef>
#include <vector>

#include "sandpile/int_matrix.hpp"

namespace oracle {

using sandpile::BigInt;
using sandpile::IntMatrix;

/// Fraction-free Gaussian elimination.
inline BigInt bareiss_determinant(IntMatrix a) {
    const std::size_t n = a.rows();
    if (n == 0) return 1;
    BigInt sign = 1, prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a(k, k) == 0) {
            std::size_t swap = k + 1;
            while (swap < n && a(swap, k) == 0) ++swap;
            if (swap == n) return 0;
            for (std::size_t c = 0; c < n; ++c) std::swap(a(k, c), a(swap, c));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
        }
        prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
}

inline BigInt gcd(BigInt a, BigInt b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        BigInt t = a % b;
        a = b;
        b = t;
    }
    return a;
}

inline void combinations(std::size_t n, std::size_t k, std::vector<std::vector<std::size_t>>& out) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    if (k > n) return;
    for (;;) {
        out.push_back(idx);
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

/// gcd of all k x k minors; zero when every minor vanishes.
inline BigInt determinantal_divisor(const IntMatrix& m, std::size_t k) {
    std::vector<std::vector<std::size_t>> rows, cols;
    combinations(m.rows(), k, rows);
    combinations(m.cols(), k, cols);
    BigInt g = 0;
    for (const auto& rs : rows) {
        for (const auto& cs : cols) {
            IntMatrix sub(k, k);
            for (std::size_t i = 0; i < k; ++i) {
                for (std::size_t j = 0; j < k; ++j) sub(i, j) = m(rs[i], cs[j]);
            }
            g = gcd(g, bareiss_determinant(sub));
        }
    }
    return g;
}

/// Invariant factors from the determinantal divisors: d_k = D_k / D_{k-1}.
/// Returns the nonzero factors; the rank is their count.
inline std::vector<BigInt> factors_from_minors(const IntMatrix& m) {
    std::vector<BigInt> out;
    BigInt prev = 1;
    for (std::size_t k = 1; k <= std::min(m.rows(), m.cols()); ++k) {
        const BigInt d = determinantal_divisor(m, k);
        if (d == 0) break;
        out.push_back(d / prev);
        prev = d;
    }
    return out;
}

/// Plain textbook reduction: repeatedly move the smallest nonzero entry of
/// the remaining block to the corner and take remainders with the Euclidean
/// algorithm; a corner that fails to divide the rest is fixed by adding the
/// offending row. Intentionally written without reference to the library
/// implementation. Returns the diagonal (zeros included) in divisibility
/// order.
inline std::vector<BigInt> naive_diagonal(IntMatrix a) {
    const std::size_t rows = a.rows(), cols = a.cols();
    std::vector<BigInt> diag;
    for (std::size_t t = 0; t < std::min(rows, cols); ++t) {
        for (;;) {
            bool found = false;
            std::size_t br = t, bc = t;
            BigInt best = 0;
            for (std::size_t i = t; i < rows; ++i) {
                for (std::size_t j = t; j < cols; ++j) {
                    BigInt v = a(i, j) < 0 ? BigInt(-a(i, j)) : a(i, j);
                    if (v != 0 && (!found || v < best)) {
                        found = true;
                        best = v;
                        br = i;
                        bc = j;
                    }
                }
            }
            if (!found) break;
            for (std::size_t j = 0; j < cols; ++j) std::swap(a(t, j), a(br, j));
            for (std::size_t i = 0; i < rows; ++i) std::swap(a(i, t), a(i, bc));
            bool clean = true;
            for (std::size_t i = t + 1; i < rows; ++i) {
                const BigInt f = a(i, t) / a(t, t);
                for (std::size_t j = t; j < cols; ++j) a(i, j) -= f * a(t, j);
                if (a(i, t) != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < cols; ++j) {
                const BigInt f = a(t, j) / a(t, t);
                for (std::size_t i = t; i < rows; ++i) a(i, j) -= f * a(i, t);
                if (a(t, j) != 0) clean = false;
            }
            if (!clean) continue;
            bool divides = true;
            for (std::size_t i = t + 1; i < rows && divides; ++i) {
                for (std::size_t j = t + 1; j < cols; ++j) {
                    if (a(i, j) % a(t, t) != 0) {
                        for (std::size_t c = t; c < cols; ++c) a(t, c) += a(i, c);
                        divides = false;
                        break;
                    }
                }
            }
            if (divides) break;
        }
        diag.push_back(a(t, t) < 0 ? BigInt(-a(t, t)) : a(t, t));
    }
    std::stable_partition(diag.begin(), diag.end(), [](const BigInt& d) { return d != 0; });
    return diag;
}

}  // namespace oracle

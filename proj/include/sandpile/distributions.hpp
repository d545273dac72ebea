#pragma once

#include <cstddef>
#include <map>
#include <string>

#include "sandpile/gf_matrix.hpp"

namespace sandpile {

inline constexpr double kDefaultTolerance = 1e-15;

/// prod_{i >= from} (1 - p^-i), truncated at the first I with
/// p^-I / (p - 1) < tol (the geometric bound on the neglected tail).
[[nodiscard]] double q_product(Prime p, std::size_t from, double tol = kDefaultTolerance);

/// prod_{i = 1}^{count} (1 - p^-i); empty product is 1.
[[nodiscard]] double finite_q_product(Prime p, std::size_t count);

/// Limiting P(corank(L mod p) = 1 + k) for the random directed bipartite
/// Laplacian L:
///   p^-(k^2 + k) * prod_{i >= k+2}(1 - p^-i) / prod_{i=1}^{k}(1 - p^-i).
[[nodiscard]] double theorem_pmf(Prime p, std::size_t k, double tol = kDefaultTolerance);

/// Limiting P(rank deficiency = k) for an n x (n+u) matrix with iid entries:
///   p^-(k(u+k)) * prod_{i >= k+1}(1 - p^-i) / prod_{i=1}^{k+u}(1 - p^-i).
[[nodiscard]] double iid_pmf(Prime p, std::size_t u, std::size_t k, double tol = kDefaultTolerance);

enum class PmfKind { theorem, iid, empirical };

[[nodiscard]] std::string to_string(PmfKind kind);

/// Probability mass over corank values, where corank is the right-nullspace
/// dimension. The theorem pmf for deficiency k is stored at corank 1 + k; the
/// iid(u) pmf at corank u + k (an n x (n+u) matrix of rank n - k).
struct CorankPmf {
    Prime p{2};
    PmfKind kind = PmfKind::empirical;
    std::size_t u = 0;  // meaningful for PmfKind::iid
    std::map<std::size_t, double> mass;
    double truncation_error = 0.0;  // 1 - sum of listed masses

    [[nodiscard]] double at(std::size_t corank) const {
        const auto it = mass.find(corank);
        return it == mass.end() ? 0.0 : it->second;
    }
    [[nodiscard]] double total() const;
};

/// Tabulates k = 0..k_max. `u` is used for PmfKind::iid only.
[[nodiscard]] CorankPmf pmf_table(Prime p, PmfKind kind, std::size_t k_max, std::size_t u = 0,
                                  double tol = kDefaultTolerance);

}  // namespace sandpile

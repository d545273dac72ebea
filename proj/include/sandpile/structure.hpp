#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sandpile/gf_matrix.hpp"
#include "sandpile/rng.hpp"

namespace sandpile {

/// Law of a Laplacian row X = (x_1, ..., x_n, 0, ..., -sum x_i, 0, ..., 0):
/// the first n coordinates are iid Bernoulli(q) reduced mod p, the
/// coordinate `neg_sum_index` (0-based, at or after n) carries minus their
/// sum, and all others are zero.
struct LaplacianRowLaw {
    std::size_t n = 0;
    std::size_t total_dim = 0;
    std::size_t neg_sum_index = 0;
    double q = 0.5;
    Prime p{2};

    void validate() const;
};

/// sup_a |P(X . w = a) - 1/p|, exact.
///
/// Since X . w = sum_i x_i (w_i - w_j) with j = neg_sum_index, the vector is
/// first shifted so that w_j = 0; a p-state distribution over the partial dot
/// product then suffices.
[[nodiscard]] double rho_L(const GfVector& w, const LaplacianRowLaw& law);

/// min over a in F_p of #{i < n : w_i != a}.
[[nodiscard]] std::size_t min_nonconstant_support(const GfVector& w, std::size_t n);

/// Exact P(x_1 + ... + x_n = 0 mod p) for iid Bernoulli(q) x_i.
[[nodiscard]] double zero_sum_prob(std::size_t n, double q, Prime p);

/// P(x_1 + ... + x_n = 0 mod p) - 1/p from the character sum
///   (1/p) sum_{t=1}^{p-1} (1 - q + q w^t)^n,  w = exp(2 pi i / p),
/// which keeps relative precision where zero_sum_prob - 1/p cancels to
/// round-off (around 1e-16).
[[nodiscard]] double zero_sum_deviation(std::size_t n, double q, Prime p);

/// Upper bound (1 - beta)^codim on P(X in V) for a min-entropy-beta vector X
/// and a subspace V of codimension codim.
[[nodiscard]] double odlyzko_bound(double beta, std::size_t codim);

struct OdlyzkoCheck {
    std::size_t trials = 0;
    std::size_t hits = 0;
    std::size_t codim = 0;
    double frequency = 0.0;
    double bound = 0.0;
    double sigma_hat = 0.0;
    bool within_bound = false;  // frequency <= bound + 4 sigma_hat
};

using VectorSampler = std::function<GfVector(Rng&)>;

/// Samples `trials` vectors and counts how many fall in V = {x : C x = 0},
/// where the rows of `constraints` span the orthogonal complement of V.
[[nodiscard]] OdlyzkoCheck odlyzko_empirical_check(const GfMatrix& constraints, double beta,
                                                   const VectorSampler& sample, std::size_t trials,
                                                   Rng& rng);

/// Vectors of length `size` with iid Bernoulli(q) entries in {0, 1}; their
/// min-entropy is min(q, 1 - q).
[[nodiscard]] VectorSampler bernoulli_vector_sampler(Prime p, std::size_t size, double q);

inline constexpr std::size_t kMaxEnumeratedCoordinates = 20;

/// Exact P(X in H) for H = span(basis) by enumerating all 2^n supports of
/// the iid block. Throws std::length_error when law.n exceeds
/// kMaxEnumeratedCoordinates.
[[nodiscard]] double subspace_hit_prob_bruteforce(std::span<const GfVector> basis, const LaplacianRowLaw& law);

/// Basis of the orthogonal complement of span(basis) in F_p^dim.
[[nodiscard]] std::vector<GfVector> orthogonal_complement(std::span<const GfVector> basis, Prime p,
                                                          std::size_t dim);

/// max rho_L(w) over all w in the orthogonal complement of H outside F_p * 1,
/// by enumerating the complement; 0 if every such w is constant. Throws
/// std::length_error if the complement has more than 2^20 elements.
[[nodiscard]] double max_rho_over_nonconstant_normals(std::span<const GfVector> basis,
                                                      const LaplacianRowLaw& law);

struct MinEntropySample {
    std::uint64_t condition;  // identifies the conditioning event
    Residue value;
};

struct MinEntropyEstimate {
    double beta_hat = 0.0;        // 1 - max Wilson upper bound of P(value | condition)
    double max_frequency = 0.0;   // largest observed conditional frequency
    std::size_t classes_used = 0;
};

/// Lower-confidence min-entropy estimate of one coordinate under
/// conditioning. Conditioning classes seen fewer than `min_class_count`
/// times are ignored.
[[nodiscard]] MinEntropyEstimate min_entropy_estimate(const std::function<MinEntropySample(Rng&)>& sample,
                                                      std::size_t trials, Rng& rng,
                                                      std::size_t min_class_count = 100);

}  // namespace sandpile

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "sandpile/gf_matrix.hpp"
#include "sandpile/int_matrix.hpp"
#include "sandpile/rng.hpp"

namespace sandpile {

/// Parameters of the random directed bipartite model: |V1| = n,
/// |V2| = floor(alpha * n), each crossing edge present with probability q.
/// alpha > 1/p is deliberately not required.
struct ModelParams {
    std::size_t n = 0;
    double alpha = 1.0;
    double q = 0.5;
    Prime p{2};
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument naming the violated bound.
    void validate() const;
    /// floor(alpha * n), tolerant of decimal round-off such as 0.29 * 100.
    [[nodiscard]] std::size_t m() const;
};

[[nodiscard]] std::size_t floor_alpha_n(double alpha, std::size_t n);

/// Directed bipartite graph; V1 vertices come first in every vertex ordering.
class BipartiteDigraph {
public:
    /// edges_12 is n x m (V1 -> V2), edges_21 is m x n (V2 -> V1), row-major 0/1.
    BipartiteDigraph(std::size_t n, std::size_t m, std::vector<std::uint8_t> edges_12,
                     std::vector<std::uint8_t> edges_21);

    [[nodiscard]] std::size_t n() const noexcept { return n_; }
    [[nodiscard]] std::size_t m() const noexcept { return m_; }
    [[nodiscard]] std::size_t vertex_count() const noexcept { return n_ + m_; }
    [[nodiscard]] bool edge_12(std::size_t i, std::size_t j) const { return edges_12_[i * m_ + j] != 0; }
    [[nodiscard]] bool edge_21(std::size_t j, std::size_t i) const { return edges_21_[j * n_ + i] != 0; }
    [[nodiscard]] std::size_t edge_count() const;

    [[nodiscard]] const std::vector<std::uint8_t>& edges_12() const noexcept { return edges_12_; }
    [[nodiscard]] const std::vector<std::uint8_t>& edges_21() const noexcept { return edges_21_; }

    friend bool operator==(const BipartiteDigraph&, const BipartiteDigraph&) = default;

private:
    std::size_t n_;
    std::size_t m_;
    std::vector<std::uint8_t> edges_12_;
    std::vector<std::uint8_t> edges_21_;
};

/// Simple directed graph on n vertices, no self-loops.
class Digraph {
public:
    Digraph(std::size_t n, std::vector<std::uint8_t> adj);
    static Digraph complete(std::size_t n);

    [[nodiscard]] std::size_t n() const noexcept { return n_; }
    [[nodiscard]] bool edge(std::size_t i, std::size_t j) const { return adj_[i * n_ + j] != 0; }
    [[nodiscard]] std::size_t edge_count() const;
    [[nodiscard]] const std::vector<std::uint8_t>& adjacency() const noexcept { return adj_; }

    friend bool operator==(const Digraph&, const Digraph&) = default;

private:
    std::size_t n_;
    std::vector<std::uint8_t> adj_;
};

/// Draws edges_12 row-major, then edges_21 row-major.
[[nodiscard]] BipartiteDigraph sample_bipartite_digraph(const ModelParams& params, Rng& rng);
/// Uses a stream seeded from params.seed.
[[nodiscard]] BipartiteDigraph sample_bipartite_digraph(const ModelParams& params);
[[nodiscard]] Digraph sample_er_digraph(std::size_t n, double q, Rng& rng);

/// Off-diagonal (i, j) is the indicator of i -> j; the diagonal is minus the
/// out-degree, so every row sums to zero.
[[nodiscard]] IntMatrix laplacian(const BipartiteDigraph& g);
[[nodiscard]] IntMatrix laplacian(const Digraph& g);
[[nodiscard]] GfMatrix laplacian_mod_p(const BipartiteDigraph& g, Prime p);
[[nodiscard]] GfMatrix laplacian_mod_p(const Digraph& g, Prime p);

/// Submatrix on the given (strictly increasing, in-range) row and column indices.
[[nodiscard]] GfMatrix restrict(const GfMatrix& m, std::span<const std::size_t> row_set,
                                std::span<const std::size_t> col_set);
/// The indices first, first + 1, ..., last - 1.
[[nodiscard]] std::vector<std::size_t> index_range(std::size_t first, std::size_t last);

// JSON: {"n", "m", "edges_12": [[0/1...]...], "edges_21": [[...]...]} for the
// bipartite model and {"n", "adj": [[...]...]} for a plain digraph.
[[nodiscard]] nlohmann::json to_json(const BipartiteDigraph& g);
[[nodiscard]] nlohmann::json to_json(const Digraph& g);
[[nodiscard]] BipartiteDigraph bipartite_from_json(const nlohmann::json& j);
[[nodiscard]] Digraph digraph_from_json(const nlohmann::json& j);

}  // namespace sandpile

#include "sandpile/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

namespace sandpile {

std::size_t floor_alpha_n(double alpha, std::size_t n) {
    return static_cast<std::size_t>(std::floor(alpha * static_cast<double>(n) + 1e-9));
}

void ModelParams::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
    if (n < 1) fail("n must be at least 1");
    if (!(q > 0.0 && q < 1.0)) {
        std::ostringstream s;
        s << "q must satisfy 0 < q < 1 (got " << q << ")";
        fail(s.str());
    }
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        std::ostringstream s;
        s << "alpha must satisfy 0 < alpha <= 1 (got " << alpha << ")";
        fail(s.str());
    }
    if (m() < 1) {
        std::ostringstream s;
        s << "floor(alpha * n) must be at least 1 (alpha = " << alpha << ", n = " << n << ")";
        fail(s.str());
    }
}

std::size_t ModelParams::m() const { return floor_alpha_n(alpha, n); }

namespace {

void check_indicators(const std::vector<std::uint8_t>& v, std::size_t expected, const char* name) {
    if (v.size() != expected) {
        throw std::invalid_argument(std::string(name) + " has " + std::to_string(v.size()) +
                                    " entries, expected " + std::to_string(expected));
    }
    if (!std::ranges::all_of(v, [](std::uint8_t x) { return x <= 1; })) {
        throw std::invalid_argument(std::string(name) + " entries must be 0 or 1");
    }
}

std::size_t count_ones(const std::vector<std::uint8_t>& v) {
    return static_cast<std::size_t>(std::ranges::count(v, std::uint8_t{1}));
}

}  // namespace

BipartiteDigraph::BipartiteDigraph(std::size_t n, std::size_t m, std::vector<std::uint8_t> edges_12,
                                   std::vector<std::uint8_t> edges_21)
    : n_(n), m_(m), edges_12_(std::move(edges_12)), edges_21_(std::move(edges_21)) {
    check_indicators(edges_12_, n_ * m_, "edges_12");
    check_indicators(edges_21_, m_ * n_, "edges_21");
}

std::size_t BipartiteDigraph::edge_count() const { return count_ones(edges_12_) + count_ones(edges_21_); }

Digraph::Digraph(std::size_t n, std::vector<std::uint8_t> adj) : n_(n), adj_(std::move(adj)) {
    check_indicators(adj_, n_ * n_, "adj");
    for (std::size_t i = 0; i < n_; ++i) {
        if (adj_[i * n_ + i]) throw std::invalid_argument("adj must have a zero diagonal");
    }
}

Digraph Digraph::complete(std::size_t n) {
    std::vector<std::uint8_t> adj(n * n, 1);
    for (std::size_t i = 0; i < n; ++i) adj[i * n + i] = 0;
    return Digraph(n, std::move(adj));
}

std::size_t Digraph::edge_count() const { return count_ones(adj_); }

BipartiteDigraph sample_bipartite_digraph(const ModelParams& params, Rng& rng) {
    params.validate();
    const std::size_t n = params.n;
    const std::size_t m = params.m();
    const Bernoulli coin(params.q);
    std::vector<std::uint8_t> e12(n * m), e21(m * n);
    for (auto& x : e12) x = coin(rng);
    for (auto& x : e21) x = coin(rng);
    return BipartiteDigraph(n, m, std::move(e12), std::move(e21));
}

BipartiteDigraph sample_bipartite_digraph(const ModelParams& params) {
    Rng rng = make_stream(params.seed, 0);
    return sample_bipartite_digraph(params, rng);
}

Digraph sample_er_digraph(std::size_t n, double q, Rng& rng) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must satisfy 0 < q < 1");
    const Bernoulli coin(q);
    std::vector<std::uint8_t> adj(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) adj[i * n + j] = coin(rng);
        }
    }
    return Digraph(n, std::move(adj));
}

namespace {

// Fills a Laplacian through `put(row, col, value)` with value in {-deg, 1}.
template <class Put>
void fill_laplacian(const BipartiteDigraph& g, Put&& put) {
    const std::size_t n = g.n(), m = g.m();
    for (std::size_t i = 0; i < n; ++i) {
        std::int64_t degree = 0;
        for (std::size_t j = 0; j < m; ++j) {
            if (g.edge_12(i, j)) {
                put(i, n + j, 1);
                ++degree;
            }
        }
        put(i, i, -degree);
    }
    for (std::size_t j = 0; j < m; ++j) {
        std::int64_t degree = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (g.edge_21(j, i)) {
                put(n + j, i, 1);
                ++degree;
            }
        }
        put(n + j, n + j, -degree);
    }
}

template <class Put>
void fill_laplacian(const Digraph& g, Put&& put) {
    for (std::size_t i = 0; i < g.n(); ++i) {
        std::int64_t degree = 0;
        for (std::size_t j = 0; j < g.n(); ++j) {
            if (g.edge(i, j)) {
                put(i, j, 1);
                ++degree;
            }
        }
        put(i, i, -degree);
    }
}

template <class G>
IntMatrix integer_laplacian(const G& g, std::size_t size) {
    IntMatrix out(size, size);
    fill_laplacian(g, [&](std::size_t r, std::size_t c, std::int64_t v) { out(r, c) = v; });
    return out;
}

template <class G>
GfMatrix modular_laplacian(const G& g, std::size_t size, Prime p) {
    std::vector<Residue> entries(size * size, 0);
    fill_laplacian(g, [&](std::size_t r, std::size_t c, std::int64_t v) {
        entries[r * size + c] = p.reduce(v);
    });
    return GfMatrix(p, size, size, std::move(entries));
}

}  // namespace

IntMatrix laplacian(const BipartiteDigraph& g) { return integer_laplacian(g, g.vertex_count()); }
IntMatrix laplacian(const Digraph& g) { return integer_laplacian(g, g.n()); }
GfMatrix laplacian_mod_p(const BipartiteDigraph& g, Prime p) { return modular_laplacian(g, g.vertex_count(), p); }
GfMatrix laplacian_mod_p(const Digraph& g, Prime p) { return modular_laplacian(g, g.n(), p); }

namespace {

void check_index_set(std::span<const std::size_t> set, std::size_t bound, const char* name) {
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (set[i] >= bound) {
            throw std::invalid_argument(std::string(name) + " index " + std::to_string(set[i]) +
                                        " out of range (size " + std::to_string(bound) + ")");
        }
        if (i > 0 && set[i] <= set[i - 1]) {
            throw std::invalid_argument(std::string(name) + " indices must be strictly increasing");
        }
    }
}

}  // namespace

GfMatrix restrict(const GfMatrix& m, std::span<const std::size_t> row_set,
                  std::span<const std::size_t> col_set) {
    check_index_set(row_set, m.rows(), "row");
    check_index_set(col_set, m.cols(), "column");
    std::vector<Residue> entries;
    entries.reserve(row_set.size() * col_set.size());
    for (std::size_t r : row_set) {
        for (std::size_t c : col_set) entries.push_back(m(r, c));
    }
    return GfMatrix(m.prime(), row_set.size(), col_set.size(), std::move(entries));
}

std::vector<std::size_t> index_range(std::size_t first, std::size_t last) {
    std::vector<std::size_t> out(last > first ? last - first : 0);
    std::iota(out.begin(), out.end(), first);
    return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

nlohmann::json nested(const std::vector<std::uint8_t>& flat, std::size_t rows, std::size_t cols) {
    auto out = nlohmann::json::array();
    for (std::size_t r = 0; r < rows; ++r) {
        auto row = nlohmann::json::array();
        for (std::size_t c = 0; c < cols; ++c) row.push_back(int{flat[r * cols + c]});
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<std::uint8_t> flatten(const nlohmann::json& j, std::size_t rows, std::size_t cols,
                                  const char* name) {
    if (!j.is_array() || j.size() != rows) {
        throw std::invalid_argument(std::string(name) + " must be an array of " + std::to_string(rows) + " rows");
    }
    std::vector<std::uint8_t> out;
    out.reserve(rows * cols);
    for (const auto& row : j) {
        if (!row.is_array() || row.size() != cols) {
            throw std::invalid_argument(std::string(name) + " rows must have " + std::to_string(cols) + " entries");
        }
        for (const auto& x : row) {
            if (!x.is_number_integer() || (x.get<int>() != 0 && x.get<int>() != 1)) {
                throw std::invalid_argument(std::string(name) + " entries must be 0 or 1");
            }
            out.push_back(static_cast<std::uint8_t>(x.get<int>()));
        }
    }
    return out;
}

std::size_t size_field(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number_unsigned()) {
        throw std::invalid_argument(std::string("graph JSON needs a nonnegative integer '") + key + "'");
    }
    return j.at(key).get<std::size_t>();
}

}  // namespace

nlohmann::json to_json(const BipartiteDigraph& g) {
    return {{"n", g.n()},
            {"m", g.m()},
            {"edges_12", nested(g.edges_12(), g.n(), g.m())},
            {"edges_21", nested(g.edges_21(), g.m(), g.n())}};
}

nlohmann::json to_json(const Digraph& g) {
    return {{"n", g.n()}, {"adj", nested(g.adjacency(), g.n(), g.n())}};
}

BipartiteDigraph bipartite_from_json(const nlohmann::json& j) {
    const std::size_t n = size_field(j, "n");
    const std::size_t m = size_field(j, "m");
    if (!j.contains("edges_12") || !j.contains("edges_21")) {
        throw std::invalid_argument("bipartite graph JSON needs 'edges_12' and 'edges_21'");
    }
    return BipartiteDigraph(n, m, flatten(j.at("edges_12"), n, m, "edges_12"),
                            flatten(j.at("edges_21"), m, n, "edges_21"));
}

Digraph digraph_from_json(const nlohmann::json& j) {
    const std::size_t n = size_field(j, "n");
    if (!j.contains("adj")) throw std::invalid_argument("digraph JSON needs 'adj'");
    return Digraph(n, flatten(j.at("adj"), n, n, "adj"));
}

}  // namespace sandpile

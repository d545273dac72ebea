#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "sandpile/graph.hpp"
#include "sandpile/rng.hpp"

using namespace sandpile;

namespace {

ModelParams params(std::size_t n, double alpha, double q, std::uint64_t seed = 1) {
    ModelParams mp;
    mp.n = n;
    mp.alpha = alpha;
    mp.q = q;
    mp.seed = seed;
    return mp;
}

bool all_zero(const IntMatrix& m) {
    return std::ranges::all_of(m.entries(), [](const BigInt& x) { return x == 0; });
}

}  // namespace

TEST_CASE("parameter validation names the bound") {
    CHECK_NOTHROW(params(10, 1.0, 0.5).validate());
    CHECK_THROWS_WITH_AS(params(10, 0.0, 0.5).validate(), doctest::Contains("alpha"), std::invalid_argument);
    CHECK_THROWS_AS(params(10, 1.5, 0.5).validate(), std::invalid_argument);
    CHECK_THROWS_WITH_AS(params(10, 1.0, 1.0).validate(), doctest::Contains("q"), std::invalid_argument);
    CHECK_THROWS_AS(params(10, 1.0, 0.0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(params(3, 0.2, 0.5).validate(), std::invalid_argument);  // floor(0.6) = 0
    // 0.29 * 100 is 28.999999999999996 in binary floating point.
    CHECK(floor_alpha_n(0.29, 100) == 29);
    CHECK(floor_alpha_n(0.25, 10) == 2);
    CHECK(params(64, 1.0, 0.5).m() == 64);
}

TEST_CASE("sampler limits") {
    Rng rng(3);
    const auto sparse = sample_bipartite_digraph(params(10, 1.0, 1e-12), rng);
    CHECK(sparse.edge_count() == 0);
    const auto dense = sample_bipartite_digraph(params(10, 0.5, 1.0 - 1e-12), rng);
    CHECK(dense.m() == 5);
    CHECK(dense.edge_count() == 2 * 10 * 5);

    CHECK(sample_er_digraph(12, 1e-12, rng).edge_count() == 0);
    const auto full = sample_er_digraph(12, 1.0 - 1e-12, rng);
    CHECK(full == Digraph::complete(12));
    CHECK_THROWS_AS((void)sample_er_digraph(12, 0.0, rng), std::invalid_argument);
}

TEST_CASE("edge counts are binomial") {
    Rng rng(20240601);
    const auto g = sample_bipartite_digraph(params(1000, 1.0, 0.5), rng);
    const double mean = 2.0 * 1000 * 1000 * 0.5;
    CHECK(std::abs(static_cast<double>(g.edge_count()) - mean) <= 4 * 707.1);

    const auto er = sample_er_digraph(100, 0.3, rng);
    const double sigma = std::sqrt(100.0 * 99.0 * 0.3 * 0.7);
    CHECK(std::abs(static_cast<double>(er.edge_count()) - 2970.0) <= 4 * sigma);
}

TEST_CASE("sampling is reproducible from the seed") {
    const auto mp = params(30, 0.5, 0.4, 99);
    CHECK(sample_bipartite_digraph(mp) == sample_bipartite_digraph(mp));
    auto other = mp;
    other.seed = 100;
    CHECK_FALSE(sample_bipartite_digraph(mp) == sample_bipartite_digraph(other));
}

TEST_CASE("laplacian examples") {
    CHECK(all_zero(laplacian(Digraph(4, std::vector<std::uint8_t>(16, 0)))));

    const Digraph edge(2, {0, 1, 0, 0});
    CHECK(laplacian(edge) == IntMatrix(2, 2, {-1, 1, 0, 0}));
    CHECK(laplacian_mod_p(edge, Prime(2)) == GfMatrix(Prime(2), 2, 2, {1, 1, 0, 0}));

    CHECK(laplacian(Digraph::complete(3)) == IntMatrix(3, 3, {-2, 1, 1, 1, -2, 1, 1, 1, -2}));
    CHECK(laplacian_mod_p(Digraph::complete(3), Prime(2)) == GfMatrix(Prime(2), 3, 3, {0, 1, 1, 1, 0, 1, 1, 1, 0}));

    CHECK_THROWS_AS(Digraph(2, {1, 0, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(Digraph(2, {0, 2, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(BipartiteDigraph(2, 1, {1, 0}, {1}), std::invalid_argument);
}

TEST_CASE("laplacian structure on random bipartite graphs") {
    Rng rng(8);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng() % 12;
        const double alpha = 0.25 + 0.75 * static_cast<double>(rng() % 4) / 3.0;
        auto mp = params(n, alpha, 0.5);
        if (mp.m() == 0) mp.alpha = 1.0;
        const auto g = sample_bipartite_digraph(mp, rng);
        const auto l = laplacian(g);
        REQUIRE(l.rows() == n + g.m());
        CHECK(l.rows_sum_to_zero());
        bool indicators_match = true, top_left_diagonal = true;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < g.m(); ++j) {
                indicators_match &= l(i, n + j) == (g.edge_12(i, j) ? 1 : 0);
                indicators_match &= l(n + j, i) == (g.edge_21(j, i) ? 1 : 0);
            }
            for (std::size_t k = 0; k < n; ++k) top_left_diagonal &= k == i || l(i, k) == 0;
        }
        CHECK(indicators_match);
        CHECK(top_left_diagonal);

        const Prime p(trial % 2 ? 2 : 5);
        const auto lp = laplacian_mod_p(g, p);
        CHECK(lp == l.mod(p));
        const auto image = lp.apply(GfVector::ones(p, lp.cols()));
        CHECK(std::ranges::all_of(image.entries(), [](Residue x) { return x == 0; }));
    }
}

TEST_CASE("restrict examples") {
    Rng rng(9);
    const auto g = sample_bipartite_digraph(params(6, 0.5, 0.5), rng);
    const auto l = laplacian_mod_p(g, Prime(2));
    CHECK(restrict(l, index_range(0, l.rows()), index_range(0, l.cols())) == l);

    const auto block = restrict(l, index_range(0, 6), index_range(6, 9));
    REQUIRE(block.rows() == 6);
    REQUIRE(block.cols() == 3);
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 3; ++j) CHECK(block(i, j) == (g.edge_12(i, j) ? 1u : 0u));
    }

    const auto none = restrict(l, {}, index_range(0, 4));
    CHECK(none.rows() == 0);
    CHECK(rank_and_corank(none).rank == 0);

    const std::vector<std::size_t> unsorted{2, 1};
    CHECK_THROWS_AS((void)restrict(l, unsorted, index_range(0, 2)), std::invalid_argument);
    const std::vector<std::size_t> out_of_range{0, 9};
    CHECK_THROWS_AS((void)restrict(l, index_range(0, 1), out_of_range), std::invalid_argument);
}

TEST_CASE("graph json round trip") {
    Rng rng(10);
    const auto g = sample_bipartite_digraph(params(7, 0.5, 0.3), rng);
    const auto j = to_json(g);
    CHECK(j["n"] == 7);
    CHECK(j["m"] == 3);
    CHECK(bipartite_from_json(j) == g);

    const auto d = sample_er_digraph(5, 0.5, rng);
    CHECK(digraph_from_json(to_json(d)) == d);

    CHECK_THROWS_AS((void)digraph_from_json(nlohmann::json{{"n", 2}, {"adj", {{0, 1}}}}), std::invalid_argument);
    CHECK_THROWS_AS((void)bipartite_from_json(nlohmann::json{{"n", 1}}), std::invalid_argument);
}

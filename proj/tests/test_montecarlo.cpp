#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "sandpile/montecarlo.hpp"

using namespace sandpile;

namespace {

ExperimentConfig config(Model model, std::size_t n, std::size_t trials, std::uint64_t seed, std::uint32_t p = 2) {
    ExperimentConfig cfg;
    cfg.model = model;
    cfg.params.n = n;
    cfg.params.alpha = 1.0;
    cfg.params.q = 0.5;
    cfg.params.p = Prime(p);
    cfg.trials = trials;
    cfg.master_seed = seed;
    return cfg;
}

CorankPmf pmf_of(std::map<std::size_t, double> mass) {
    CorankPmf pmf;
    pmf.mass = std::move(mass);
    return pmf;
}

}  // namespace

TEST_CASE("tv distance examples") {
    const auto a = pmf_of({{1, 0.5}, {2, 0.5}});
    CHECK(tv_distance(a, a) == 0.0);
    CHECK(tv_distance(a, pmf_of({{3, 1.0}})) == doctest::Approx(1.0));
    CHECK(tv_distance(a, pmf_of({{1, 1.0}})) == doctest::Approx(0.5));
}

TEST_CASE("seed derivation") {
    CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
    CHECK(stream_seed(7, 0) != stream_seed(7, 1));
    CHECK(stream_seed(7, 1) != stream_seed(8, 1));
    Rng a = make_stream(42, 3), b = make_stream(42, 3);
    CHECK(a() == b());
}

TEST_CASE("parallel_map keeps index order and reports the lowest failing index") {
    const auto squares = parallel_map<std::size_t>(100, 8, [](std::size_t i) { return i * i; });
    for (std::size_t i = 0; i < 100; ++i) CHECK(squares[i] == i * i);
    CHECK_THROWS_WITH((void)parallel_map<int>(50, 4,
                                        [](std::size_t i) -> int {
                                            if (i % 7 == 3) throw std::runtime_error("trial " + std::to_string(i));
                                            return 0;
                                        }),
                      "trial 3");
}

TEST_CASE("reports are identical across worker counts") {
    auto cfg = config(Model::bipartite, 24, 600, 99);
    const auto reference = to_json(run_corank_experiment(cfg)).dump();
    for (std::size_t threads : {4u, 16u}) {
        cfg.threads = threads;
        CHECK(to_json(run_corank_experiment(cfg)).dump() == reference);
    }

    auto evo = config(Model::bipartite, 24, 200, 5);
    evo.statistic = Statistic::rank_evolution;
    const auto evo_ref = to_json(run_rank_evolution(evo)).dump();
    evo.threads = 16;
    CHECK(to_json(run_rank_evolution(evo)).dump() == evo_ref);
}

TEST_CASE("report bookkeeping") {
    auto cfg = config(Model::bipartite, 10, 1, 1);
    cfg.params.q = 1.0 - 1e-12;
    const auto single = run_corank_experiment(cfg);
    CHECK(single.counts.size() == 1);
    CHECK(single.total() == 1);

    const auto r = run_corank_experiment(config(Model::er, 15, 500, 2, 3));
    CHECK(r.total() == 500);
    CHECK(r.counts.begin()->first >= 1);
    for (const auto& [k, iv] : r.intervals) {
        CHECK(iv.lower >= 0.0);
        CHECK(iv.upper <= 1.0);
        CHECK(iv.lower <= r.frequency(k));
        CHECK(r.frequency(k) <= iv.upper);
    }
    REQUIRE(r.tv_distance.has_value());
    CHECK(*r.tv_distance == doctest::Approx(tv_distance(r.empirical, *r.comparison)));
    CHECK(r.seed_rule == kSeedRule);

    const auto j = to_json(r);
    for (const char* key : {"config", "counts", "pmf", "intervals", "tv_distance", "chi_square", "seed_rule"}) {
        CHECK(j.contains(key));
    }
    CHECK_FALSE(j.contains("wall_time_ms"));
    CHECK(to_json(r, true).contains("wall_time_ms"));
    CHECK(j["config"]["m"] == 15);

    CHECK_THROWS_AS((void)run_corank_experiment(config(Model::bipartite, 10, 0, 1)), std::invalid_argument);
}

TEST_CASE("snf sampling agrees with mod-p corank trial by trial") {
    for (std::uint32_t p : {2u, 3u}) {
        auto cfg = config(Model::bipartite, 6, 150, 77, p);
        cfg.params.alpha = 0.5;
        const auto modp = run_corank_experiment(cfg);
        cfg.statistic = Statistic::snf_sample;
        const auto snf = run_snf_sample(cfg);
        CHECK(snf.counts == modp.counts);
    }
    CHECK_THROWS_AS((void)run_snf_sample(config(Model::iid_rect, 6, 10, 1)), std::invalid_argument);
}

TEST_CASE("full rank frequency") {
    auto cfg = config(Model::bipartite, 40, 30, 3);
    cfg.statistic = Statistic::full_rank_at;
    cfg.row_count = 1;
    const auto one_row = run_full_rank_frequency(cfg);
    // A single Laplacian row is zero only if its vertex has no out-edges.
    CHECK(one_row.frequency(1) == 1.0);
    cfg.row_count = 200;
    CHECK_THROWS_AS((void)run_full_rank_frequency(cfg), std::invalid_argument);
}

TEST_CASE("rank evolution buckets") {
    auto cfg = config(Model::bipartite, 32, 1500, 11);
    cfg.statistic = Statistic::rank_evolution;
    const auto r = run_rank_evolution(cfg);
    CHECK(r.window == 8);
    std::size_t total = 0;
    for (const auto& rec : r.records) {
        CHECK(rec.hits <= rec.exposures);
        total += rec.exposures;
        if (rec.codim == 1) CHECK(rec.frequency() == 1.0);
        if (rec.exposures >= 500) CHECK(std::abs(rec.frequency() - rec.expected) <= 3 * rec.interval.half_width());
    }
    CHECK(total == r.window * cfg.trials);
    CHECK(to_csv(r).rfind("codim,exposures,hits,frequency,expected,wilson_lower,wilson_upper\n", 0) == 0);
}

TEST_CASE("phase sweep shape") {
    auto cfg = config(Model::bipartite, 1, 20, 4);
    const auto cells = run_phase_sweep({0.25, 0.5, 1.0}, {8, 16}, cfg);
    REQUIRE(cells.size() == 6);
    CHECK(cells[0].alpha == 0.25);
    CHECK(cells[0].m == 2);
    CHECK(cells[5].n == 16);
    for (const auto& c : cells) CHECK(c.stderr_corank.has_value());

    cfg.trials = 1;
    const auto single = run_phase_sweep({1.0}, {8}, cfg);
    REQUIRE(single.size() == 1);
    CHECK_FALSE(single[0].stderr_corank.has_value());
    CHECK(to_json(single)[0]["stderr"].is_null());
}

TEST_CASE("iid model matches its limiting law") {
    auto cfg = config(Model::iid_rect, 64, 20000, 2024);
    cfg.u = 0;
    const auto r = run_corank_experiment(cfg);
    CHECK(std::abs(r.frequency(0) - 0.288788095086602421) <= 0.015);
}

TEST_CASE("one extra column and the bipartite Laplacian share a corank law") {
    auto iid = config(Model::iid_rect, 64, 20000, 31);
    iid.u = 1;
    const auto bip = config(Model::bipartite, 64, 20000, 32);
    const auto a = run_corank_experiment(iid);
    const auto b = run_corank_experiment(bip);
    CHECK(tv_distance(a.empirical, b.empirical) <= 0.03);
}

TEST_CASE("Wilson intervals cover the limiting masses") {
    // 20 independent runs, coranks 1..5 each: 100 buckets at nominal 95%.
    std::size_t covered = 0, buckets = 0;
    const auto limit = pmf_table(Prime(2), PmfKind::iid, 40, 1);
    for (std::uint64_t run = 0; run < 20; ++run) {
        auto cfg = config(Model::iid_rect, 40, 1000, 1000 + run);
        cfg.u = 1;
        const auto r = run_corank_experiment(cfg);
        for (std::size_t corank = 1; corank <= 5; ++corank) {
            const auto it = r.counts.find(corank);
            const auto iv = wilson_interval(it == r.counts.end() ? 0 : it->second, r.total());
            ++buckets;
            if (iv.lower <= limit.at(corank) && limit.at(corank) <= iv.upper) ++covered;
        }
    }
    CHECK(buckets == 100);
    CHECK(covered >= 92);
}

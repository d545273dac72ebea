#include "sandpile/montecarlo.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "sandpile/snf.hpp"

namespace sandpile {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Enough terms that the untabulated tail is below double precision for p >= 2.
constexpr std::size_t kComparisonKMax = 40;

bool is_graph_model(Model m) { return m == Model::bipartite || m == Model::er; }

}  // namespace

std::string to_string(Model model) {
    switch (model) {
        case Model::bipartite: return "bipartite";
        case Model::er: return "er";
        case Model::iid_rect: return "iid_rect";
    }
    return "unknown";
}

std::string to_string(Statistic statistic) {
    switch (statistic) {
        case Statistic::corank: return "corank";
        case Statistic::rank_evolution: return "rank_evolution";
        case Statistic::full_rank_at: return "full_rank_at";
        case Statistic::snf_sample: return "snf_sample";
    }
    return "unknown";
}

void ExperimentConfig::validate() const {
    params.validate();
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");
    if (threads < 1) throw std::invalid_argument("threads must be at least 1");
    if (statistic == Statistic::rank_evolution) {
        if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must satisfy 0 < delta < 1");
        if (floor_alpha_n(delta, params.n) > matrix_rows()) {
            throw std::invalid_argument("rank-evolution window exceeds the row count");
        }
    }
    if (statistic == Statistic::full_rank_at && row_count > matrix_rows()) {
        throw std::invalid_argument("row_count " + std::to_string(row_count) + " exceeds the row count " +
                                    std::to_string(matrix_rows()));
    }
    if (statistic == Statistic::snf_sample && !is_graph_model(model)) {
        throw std::invalid_argument("snf_sample requires a graph model");
    }
}

std::size_t ExperimentConfig::matrix_rows() const {
    switch (model) {
        case Model::bipartite: return params.n + params.m();
        case Model::er: return params.n;
        case Model::iid_rect: return params.n;
    }
    return 0;
}

std::size_t ExperimentConfig::matrix_cols() const {
    return model == Model::iid_rect ? params.n + u : matrix_rows();
}

GfMatrix sample_model_matrix(const ExperimentConfig& cfg, Rng& rng) {
    const Prime p = cfg.params.p;
    switch (cfg.model) {
        case Model::bipartite: return laplacian_mod_p(sample_bipartite_digraph(cfg.params, rng), p);
        case Model::er: return laplacian_mod_p(sample_er_digraph(cfg.params.n, cfg.params.q, rng), p);
        case Model::iid_rect: {
            const std::size_t rows = cfg.matrix_rows(), cols = cfg.matrix_cols();
            const Bernoulli coin(cfg.params.q);
            std::vector<Residue> entries(rows * cols);
            for (auto& e : entries) e = coin(rng) ? 1 : 0;
            return GfMatrix(p, rows, cols, std::move(entries));
        }
    }
    throw std::logic_error("unknown model");
}

std::size_t ExperimentReport::total() const {
    std::size_t t = 0;
    for (const auto& [k, c] : counts) t += c;
    return t;
}

double ExperimentReport::frequency(std::size_t outcome) const { return empirical.at(outcome); }

CorankPmf empirical_pmf(Prime p, const std::map<std::size_t, std::size_t>& counts) {
    CorankPmf pmf;
    pmf.p = p;
    pmf.kind = PmfKind::empirical;
    std::size_t total = 0;
    for (const auto& [k, c] : counts) total += c;
    for (const auto& [k, c] : counts) {
        pmf.mass[k] = total ? static_cast<double>(c) / static_cast<double>(total) : 0.0;
    }
    return pmf;
}

double tv_distance(const CorankPmf& a, const CorankPmf& b) {
    std::set<std::size_t> keys;
    for (const auto& [k, v] : a.mass) keys.insert(k);
    for (const auto& [k, v] : b.mass) keys.insert(k);
    double sum = 0.0;
    for (std::size_t k : keys) sum += std::abs(a.at(k) - b.at(k));
    return 0.5 * sum;
}

namespace {

ExperimentReport make_report(const ExperimentConfig& cfg, const std::vector<std::size_t>& outcomes,
                             bool compare, Clock::time_point start) {
    ExperimentReport r;
    r.config = cfg;
    for (std::size_t o : outcomes) ++r.counts[o];
    r.empirical = empirical_pmf(cfg.params.p, r.counts);
    for (const auto& [k, c] : r.counts) r.intervals[k] = wilson_interval(c, outcomes.size());
    if (compare) {
        const PmfKind kind = cfg.comparison.value_or(cfg.model == Model::iid_rect ? PmfKind::iid : PmfKind::theorem);
        r.comparison = pmf_table(cfg.params.p, kind, kComparisonKMax, cfg.u);
        r.tv_distance = tv_distance(r.empirical, *r.comparison);
        r.chi_square = chi_square(r.counts, r.comparison->mass);
    }
    r.seed_rule = std::string(kSeedRule);
    r.wall_time_ms = elapsed_ms(start);
    return r;
}

}  // namespace

ExperimentReport run_corank_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto start = Clock::now();
    const bool graph = is_graph_model(cfg.model);
    const auto outcomes = parallel_map<std::size_t>(cfg.trials, cfg.threads, [&](std::size_t i) {
        Rng rng = make_stream(cfg.master_seed, i);
        const std::size_t corank = rank_and_corank(sample_model_matrix(cfg, rng)).corank;
        if (graph && corank == 0) {
            throw std::logic_error("trial " + std::to_string(i) +
                                   ": Laplacian has corank 0 mod p, but the all-ones vector is always in its kernel");
        }
        return corank;
    });
    return make_report(cfg, outcomes, true, start);
}

ExperimentReport run_full_rank_frequency(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto start = Clock::now();
    const std::size_t rows = cfg.row_count ? cfg.row_count : cfg.params.n;
    if (rows > cfg.matrix_rows()) throw std::invalid_argument("row_count exceeds the row count");
    const auto row_set = index_range(0, rows);
    const auto col_set = index_range(0, cfg.matrix_cols());
    const auto outcomes = parallel_map<std::size_t>(cfg.trials, cfg.threads, [&](std::size_t i) -> std::size_t {
        Rng rng = make_stream(cfg.master_seed, i);
        const GfMatrix top = restrict(sample_model_matrix(cfg, rng), row_set, col_set);
        return rank_and_corank(top).rank == rows ? 1 : 0;
    });
    return make_report(cfg, outcomes, false, start);
}

ExperimentReport run_snf_sample(const ExperimentConfig& cfg) {
    cfg.validate();
    if (!is_graph_model(cfg.model)) throw std::invalid_argument("snf_sample requires a graph model");
    const auto start = Clock::now();
    const Prime p = cfg.params.p;
    const auto outcomes = parallel_map<std::size_t>(cfg.trials, cfg.threads, [&](std::size_t i) {
        Rng rng = make_stream(cfg.master_seed, i);
        const IntMatrix lap = cfg.model == Model::bipartite ? laplacian(sample_bipartite_digraph(cfg.params, rng))
                                                            : laplacian(sample_er_digraph(cfg.params.n, cfg.params.q, rng));
        const InvariantFactors f = invariant_factors(lap);
        return f.free_rank + p_rank(f, p);
    });
    return make_report(cfg, outcomes, true, start);
}

RankEvolutionReport run_rank_evolution(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto start = Clock::now();
    const std::size_t rows = cfg.matrix_rows();
    const std::size_t window = floor_alpha_n(cfg.delta, cfg.params.n);
    const std::size_t first_observed = rows - window;
    const Prime p = cfg.params.p;

    using Observations = std::vector<std::pair<std::size_t, bool>>;
    const auto per_trial = parallel_map<Observations>(cfg.trials, cfg.threads, [&](std::size_t i) {
        Rng rng = make_stream(cfg.master_seed, i);
        const GfMatrix m = sample_model_matrix(cfg, rng);
        RankTracker tracker(p, m.cols());
        Observations obs;
        obs.reserve(window);
        for (std::size_t r = 0; r < rows; ++r) {
            const std::size_t codim = tracker.corank();
            const bool hit = tracker.add_row(m.row(r)).entered_span;
            if (r >= first_observed) obs.emplace_back(codim, hit);
        }
        return obs;
    });

    std::map<std::size_t, RankEvolutionRecord> buckets;
    for (const auto& obs : per_trial) {
        for (const auto& [codim, hit] : obs) {
            auto& rec = buckets[codim];
            rec.codim = codim;
            ++rec.exposures;
            if (hit) ++rec.hits;
        }
    }
    RankEvolutionReport report;
    report.config = cfg;
    report.window = window;
    for (auto& [codim, rec] : buckets) {
        rec.expected = codim == 0 ? 1.0 : std::pow(static_cast<double>(p.value()), -static_cast<double>(codim - 1));
        rec.interval = wilson_interval(rec.hits, rec.exposures);
        report.records.push_back(rec);
    }
    report.seed_rule = std::string(kSeedRule);
    report.wall_time_ms = elapsed_ms(start);
    return report;
}

std::vector<PhaseCell> run_phase_sweep(const std::vector<double>& alphas, const std::vector<std::size_t>& ns,
                                       const ExperimentConfig& cfg) {
    std::vector<PhaseCell> cells;
    std::size_t index = 0;
    for (double alpha : alphas) {
        for (std::size_t n : ns) {
            ExperimentConfig cell_cfg = cfg;
            cell_cfg.statistic = Statistic::corank;
            cell_cfg.params.alpha = alpha;
            cell_cfg.params.n = n;
            cell_cfg.master_seed = stream_seed(cfg.master_seed, index++);
            const ExperimentReport r = run_corank_experiment(cell_cfg);

            PhaseCell cell{alpha, n, cell_cfg.params.m(), r.total(), 0.0, std::nullopt};
            double sum = 0.0, sum_sq = 0.0;
            for (const auto& [k, c] : r.counts) {
                const double kd = static_cast<double>(k), cd = static_cast<double>(c);
                sum += kd * cd;
                sum_sq += kd * kd * cd;
            }
            const double t = static_cast<double>(cell.trials);
            cell.mean_corank = sum / t;
            if (cell.trials > 1) {
                const double var = std::max(0.0, (sum_sq - t * cell.mean_corank * cell.mean_corank) / (t - 1.0));
                cell.stderr_corank = std::sqrt(var / t);
            }
            cells.push_back(cell);
        }
    }
    return cells;
}

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j{{"model", to_string(cfg.model)},
                     {"n", cfg.params.n},
                     {"alpha", cfg.params.alpha},
                     {"m", cfg.params.m()},
                     {"q", cfg.params.q},
                     {"p", cfg.params.p.value()},
                     {"trials", cfg.trials},
                     {"master_seed", cfg.master_seed},
                     {"statistic", to_string(cfg.statistic)}};
    if (cfg.model == Model::iid_rect) j["u"] = cfg.u;
    if (cfg.statistic == Statistic::full_rank_at) j["row_count"] = cfg.row_count ? cfg.row_count : cfg.params.n;
    if (cfg.statistic == Statistic::rank_evolution) j["delta"] = cfg.delta;
    return j;
}

namespace {

nlohmann::json pmf_json(const CorankPmf& pmf) {
    auto j = nlohmann::json::object();
    for (const auto& [k, v] : pmf.mass) j[std::to_string(k)] = v;
    return j;
}

}  // namespace

nlohmann::json to_json(const ExperimentReport& r, bool include_timing) {
    nlohmann::json j;
    j["config"] = config_to_json(r.config);
    auto counts = nlohmann::json::object();
    for (const auto& [k, c] : r.counts) counts[std::to_string(k)] = c;
    j["counts"] = counts;
    j["pmf"] = pmf_json(r.empirical);
    auto intervals = nlohmann::json::object();
    for (const auto& [k, ci] : r.intervals) intervals[std::to_string(k)] = {ci.lower, ci.upper};
    j["intervals"] = intervals;
    if (r.comparison) {
        j["comparison"] = {{"kind", to_string(r.comparison->kind)},
                           {"pmf", pmf_json(*r.comparison)},
                           {"truncation_error", r.comparison->truncation_error}};
        if (r.comparison->kind == PmfKind::iid) j["comparison"]["u"] = r.comparison->u;
    }
    j["tv_distance"] = r.tv_distance ? nlohmann::json(*r.tv_distance) : nlohmann::json(nullptr);
    if (r.chi_square) {
        j["chi_square"] = {{"statistic", r.chi_square->statistic},
                           {"dof", r.chi_square->dof},
                           {"p_value", r.chi_square->p_value}};
    } else {
        j["chi_square"] = nullptr;
    }
    if (include_timing) j["wall_time_ms"] = r.wall_time_ms;
    j["seed_rule"] = r.seed_rule;
    return j;
}

nlohmann::json to_json(const RankEvolutionReport& r, bool include_timing) {
    nlohmann::json j;
    j["config"] = config_to_json(r.config);
    j["window"] = r.window;
    auto records = nlohmann::json::array();
    for (const auto& rec : r.records) {
        records.push_back({{"codim", rec.codim},
                           {"exposures", rec.exposures},
                           {"hits", rec.hits},
                           {"frequency", rec.frequency()},
                           {"expected", rec.expected},
                           {"wilson", {rec.interval.lower, rec.interval.upper}}});
    }
    j["records"] = records;
    if (include_timing) j["wall_time_ms"] = r.wall_time_ms;
    j["seed_rule"] = r.seed_rule;
    return j;
}

nlohmann::json to_json(const std::vector<PhaseCell>& cells) {
    auto out = nlohmann::json::array();
    for (const auto& c : cells) {
        out.push_back({{"alpha", c.alpha},
                       {"n", c.n},
                       {"m", c.m},
                       {"trials", c.trials},
                       {"mean_corank", c.mean_corank},
                       {"stderr", c.stderr_corank ? nlohmann::json(*c.stderr_corank) : nlohmann::json(nullptr)},
                       {"stderr_defined", c.stderr_corank.has_value()}});
    }
    return out;
}

namespace {

std::string fmt(double x) {
    std::ostringstream s;
    s << std::setprecision(std::numeric_limits<double>::max_digits10) << x;
    return s.str();
}

}  // namespace

std::string to_csv(const ExperimentReport& r) {
    std::ostringstream out;
    out << "outcome,count,frequency,wilson_lower,wilson_upper,expected\n";
    std::set<std::size_t> keys;
    for (const auto& [k, c] : r.counts) keys.insert(k);
    if (r.comparison) {
        for (const auto& [k, v] : r.comparison->mass) {
            if (v > 1e-12) keys.insert(k);
        }
    }
    for (std::size_t k : keys) {
        const auto it = r.counts.find(k);
        const std::size_t c = it == r.counts.end() ? 0 : it->second;
        const WilsonInterval ci = wilson_interval(c, r.total());
        out << k << ',' << c << ',' << fmt(r.empirical.at(k)) << ',' << fmt(ci.lower) << ',' << fmt(ci.upper) << ',';
        if (r.comparison) out << fmt(r.comparison->at(k));
        out << '\n';
    }
    return out.str();
}

std::string to_csv(const RankEvolutionReport& r) {
    std::ostringstream out;
    out << "codim,exposures,hits,frequency,expected,wilson_lower,wilson_upper\n";
    for (const auto& rec : r.records) {
        out << rec.codim << ',' << rec.exposures << ',' << rec.hits << ',' << fmt(rec.frequency()) << ','
            << fmt(rec.expected) << ',' << fmt(rec.interval.lower) << ',' << fmt(rec.interval.upper) << '\n';
    }
    return out.str();
}

std::string to_csv(const std::vector<PhaseCell>& cells) {
    std::ostringstream out;
    out << "alpha,n,m,trials,mean_corank,stderr\n";
    for (const auto& c : cells) {
        out << fmt(c.alpha) << ',' << c.n << ',' << c.m << ',' << c.trials << ',' << fmt(c.mean_corank) << ','
            << (c.stderr_corank ? fmt(*c.stderr_corank) : "") << '\n';
    }
    return out.str();
}

}  // namespace sandpile

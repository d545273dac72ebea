#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sandpile/distributions.hpp"
#include "sandpile/gf_matrix.hpp"
#include "sandpile/graph.hpp"
#include "sandpile/stats.hpp"

namespace sandpile {

enum class Model { bipartite, er, iid_rect };
enum class Statistic { corank, rank_evolution, full_rank_at, snf_sample };

[[nodiscard]] std::string to_string(Model model);
[[nodiscard]] std::string to_string(Statistic statistic);

struct ExperimentConfig {
    Model model = Model::bipartite;
    std::size_t u = 0;  // extra columns of the iid_rect model (n x (n + u))
    ModelParams params;  // n, alpha, q, p; params.seed is not used, see master_seed
    std::size_t trials = 1;
    std::uint64_t master_seed = 0;
    Statistic statistic = Statistic::corank;
    std::size_t row_count = 0;  // full_rank_at: number of leading rows, 0 means n
    double delta = 0.25;        // rank_evolution: the final floor(delta * n) rows are observed
    std::optional<PmfKind> comparison;  // defaults: theorem for graph models, iid(u) for iid_rect
    std::size_t threads = 1;            // affects timing only

    /// Throws std::invalid_argument naming the violated bound.
    void validate() const;
    /// Column count of the sampled matrix.
    [[nodiscard]] std::size_t matrix_cols() const;
    [[nodiscard]] std::size_t matrix_rows() const;
};

/// One sample of the configured ensemble, reduced mod p.
[[nodiscard]] GfMatrix sample_model_matrix(const ExperimentConfig& cfg, Rng& rng);

struct ExperimentReport {
    ExperimentConfig config;
    std::map<std::size_t, std::size_t> counts;
    CorankPmf empirical;
    std::map<std::size_t, WilsonInterval> intervals;
    std::optional<CorankPmf> comparison;
    std::optional<double> tv_distance;
    std::optional<ChiSquare> chi_square;
    double wall_time_ms = 0.0;
    std::string seed_rule;

    [[nodiscard]] std::size_t total() const;
    [[nodiscard]] double frequency(std::size_t outcome) const;
};

/// Corank of the sampled matrix mod p, once per trial. For the graph models
/// a trial with corank 0 aborts the run with std::logic_error.
[[nodiscard]] ExperimentReport run_corank_experiment(const ExperimentConfig& cfg);

/// Outcome 1 when the leading cfg.row_count rows (n if zero) have full row
/// rank, 0 otherwise.
[[nodiscard]] ExperimentReport run_full_rank_frequency(const ExperimentConfig& cfg);

/// Corank computed through the integer Smith normal form instead of mod-p
/// elimination: free rank of the cokernel plus the number of invariant
/// factors divisible by p. Graph models only.
[[nodiscard]] ExperimentReport run_snf_sample(const ExperimentConfig& cfg);

struct RankEvolutionRecord {
    std::size_t codim = 0;  // codimension l of the row space before the exposure
    std::size_t exposures = 0;
    std::size_t hits = 0;   // exposures whose row was already in the span
    double expected = 0.0;  // p^-(l - 1)
    WilsonInterval interval{0.0, 1.0};

    [[nodiscard]] double frequency() const {
        return exposures ? static_cast<double>(hits) / static_cast<double>(exposures) : 0.0;
    }
};

struct RankEvolutionReport {
    ExperimentConfig config;
    std::size_t window = 0;  // number of final rows observed per trial
    std::vector<RankEvolutionRecord> records;  // increasing codim
    double wall_time_ms = 0.0;
    std::string seed_rule;
};

/// Exposes the rows of each sampled Laplacian one at a time and, over the
/// final floor(delta * n) rows, tallies span hits by the current codimension.
[[nodiscard]] RankEvolutionReport run_rank_evolution(const ExperimentConfig& cfg);

struct PhaseCell {
    double alpha = 0.0;
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t trials = 0;
    double mean_corank = 0.0;
    std::optional<double> stderr_corank;  // undefined for a single trial
};

/// Mean corank for every (alpha, n) pair, alphas outermost. Cell i uses
/// master seed stream_seed(cfg.master_seed, i).
[[nodiscard]] std::vector<PhaseCell> run_phase_sweep(const std::vector<double>& alphas,
                                                     const std::vector<std::size_t>& ns,
                                                     const ExperimentConfig& cfg);

/// (1/2) sum_k |a(k) - b(k)| over the union of supports.
[[nodiscard]] double tv_distance(const CorankPmf& a, const CorankPmf& b);

/// Empirical pmf of integer-valued counts.
[[nodiscard]] CorankPmf empirical_pmf(Prime p, const std::map<std::size_t, std::size_t>& counts);

/// Runs fn(i) for i in [0, count) on `threads` workers and returns the results
/// in index order.
template <class T>
[[nodiscard]] std::vector<T> parallel_map(std::size_t count, std::size_t threads,
                                          const std::function<T(std::size_t)>& fn);

// Serialization. Timing is omitted unless requested so that reports of equal
// runs are byte-identical.
[[nodiscard]] nlohmann::json config_to_json(const ExperimentConfig& cfg);
[[nodiscard]] nlohmann::json to_json(const ExperimentReport& r, bool include_timing = false);
[[nodiscard]] nlohmann::json to_json(const RankEvolutionReport& r, bool include_timing = false);
[[nodiscard]] nlohmann::json to_json(const std::vector<PhaseCell>& cells);
[[nodiscard]] std::string to_csv(const ExperimentReport& r);
[[nodiscard]] std::string to_csv(const RankEvolutionReport& r);
[[nodiscard]] std::string to_csv(const std::vector<PhaseCell>& cells);

}  // namespace sandpile

#include "sandpile/detail/parallel.hpp"

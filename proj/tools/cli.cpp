#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sandpile/distributions.hpp"
#include "sandpile/graph.hpp"
#include "sandpile/matrix_io.hpp"
#include "sandpile/montecarlo.hpp"
#include "sandpile/snf.hpp"
#include "sandpile/structure.hpp"

namespace sandpile::cli {

namespace {

using nlohmann::json;

/// Raised for bad user input that CLI11 itself does not catch.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Output {
    std::string format = "json";
    std::string path;
    bool timing = false;
};

struct ModelOptions {
    std::string model = "bipartite";
    std::uint32_t p = 2;
    double q = 0.5;
    double alpha = 1.0;
    std::size_t n = 64;
    std::size_t u = 0;
    std::size_t trials = 1000;
    std::uint64_t seed = 0;
    std::string threads = "1";
};

std::size_t parse_threads(const std::string& text) {
    if (text == "auto") return std::max(1u, std::thread::hardware_concurrency());
    std::size_t pos = 0;
    unsigned long long value = 0;
    try {
        value = std::stoull(text, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != text.size() || value == 0 || text.front() == '-') {
        throw std::invalid_argument("--threads must be a positive integer or 'auto' (got '" + text + "')");
    }
    return static_cast<std::size_t>(value);
}

Model parse_model(const std::string& name) {
    if (name == "bipartite") return Model::bipartite;
    if (name == "er") return Model::er;
    if (name == "iid") return Model::iid_rect;
    throw std::invalid_argument("unknown model '" + name + "'");
}

ExperimentConfig make_config(const ModelOptions& o) {
    ExperimentConfig cfg;
    cfg.model = parse_model(o.model);
    cfg.u = o.u;
    cfg.params.n = o.n;
    cfg.params.alpha = o.alpha;
    cfg.params.q = o.q;
    cfg.params.p = Prime(o.p);
    cfg.params.seed = o.seed;
    cfg.trials = o.trials;
    cfg.master_seed = o.seed;
    cfg.threads = parse_threads(o.threads);
    return cfg;
}

void add_model_options(CLI::App& app, ModelOptions& o) {
    app.add_option("--model", o.model, "bipartite | er | iid")
        ->check(CLI::IsMember({"bipartite", "er", "iid"}))
        ->capture_default_str();
    app.add_option("--p", o.p, "prime modulus")->capture_default_str();
    app.add_option("--q", o.q, "edge / entry probability")->capture_default_str();
    app.add_option("--alpha", o.alpha, "|V2| = floor(alpha * n)")->capture_default_str();
    app.add_option("--n", o.n, "|V1|, or rows of the iid model")->capture_default_str();
    app.add_option("--u", o.u, "extra columns of the iid model")->capture_default_str();
    app.add_option("--trials", o.trials)->capture_default_str();
    app.add_option("--seed", o.seed, "master seed")->capture_default_str();
    app.add_option("--threads", o.threads, "worker count or 'auto'; never changes results")->capture_default_str();
}

void add_output_options(CLI::App& app, Output& o, bool csv) {
    if (csv) app.add_option("--format", o.format)->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    app.add_option("--out", o.path, "output file (default stdout)");
    app.add_flag("--timing", o.timing, "include wall_time_ms in JSON reports");
}

void emit(const Output& o, const std::string& text, std::ostream& out) {
    if (o.path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(o.path, std::ios::binary);
    if (!file) throw InputError("cannot write '" + o.path + "'");
    file << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

/// Flags from a JSON object; keys are flag names without the leading dashes.
/// Keys the command line already sets are skipped so that it wins.
std::vector<std::string> config_flags(const std::string& path, const std::vector<std::string>& given) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError("config '" + path + "': " + e.what());
    }
    if (!j.is_object()) throw InputError("config '" + path + "' must be a JSON object");

    const auto is_given = [&](const std::string& flag) {
        return std::ranges::any_of(given, [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
    };
    const auto scalar = [&](const std::string& key, const json& v) -> std::string {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number() || v.is_boolean()) return v.dump();
        throw InputError("config key '" + key + "' has an unsupported value");
    };

    std::vector<std::string> flags;
    for (const auto& [key, value] : j.items()) {
        if (key == "config") throw InputError("config files cannot nest");
        const std::string flag = "--" + key;
        if (is_given(flag)) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) flags.push_back(flag);
        } else if (value.is_array()) {
            flags.push_back(flag);
            for (const auto& v : value) flags.push_back(scalar(key, v));
        } else {
            flags.push_back(flag);
            flags.push_back(scalar(key, value));
        }
    }
    return flags;
}

/// Expands `--config FILE` into flags placed ahead of the remaining arguments.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::vector<std::string> rest;
    std::optional<std::string> path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw InputError("--config needs a file");
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (!path || rest.empty()) return rest;
    // rest[0] is the subcommand; file flags go right after it.
    auto flags = config_flags(*path, rest);
    std::vector<std::string> out{rest.front()};
    out.insert(out.end(), flags.begin(), flags.end());
    out.insert(out.end(), rest.begin() + 1, rest.end());
    return out;
}

// ---------------------------------------------------------------------------
// Subcommands

json snf_json(const std::string& source, const IntMatrix& m, const InvariantFactors& f, std::uint32_t header_p) {
    json invariants = json::array(), torsion = json::array();
    for (const auto& d : f.diag) invariants.push_back(d.str());
    for (const auto& d : f.torsion()) torsion.push_back(d.str());
    // Arbitrary-precision factors are strings only when they overflow.
    const auto compact = [](json& arr) {
        for (auto& v : arr) {
            const std::string s = v.get<std::string>();
            if (s.size() < 19) v = std::stoll(s);
        }
    };
    compact(invariants);
    compact(torsion);

    json pr = json::object();
    std::vector<std::uint32_t> primes{2, 3, 5, 7};
    if (std::ranges::find(primes, header_p) == primes.end()) primes.push_back(header_p);
    for (std::uint32_t p : primes) pr[std::to_string(p)] = p_rank(f, Prime(p));
    return json{{"source", source},      {"rows", m.rows()},    {"cols", m.cols()},
                {"invariants", invariants}, {"torsion", torsion}, {"free_rank", f.free_rank},
                {"p_rank", pr},          {"flagged", f.free_rank > 1}};
}

struct SnfOptions {
    std::string matrix_path;
    std::string graph_path;
    bool laplacian = false;
    std::string write_laplacian;
    std::uint32_t p = 2;
};

int cmd_snf(const SnfOptions& o, const Output& out_opts, std::ostream& out) {
    if (o.matrix_path.empty() == o.graph_path.empty()) throw InputError("give exactly one of --matrix or --graph");
    IntMatrix m;
    std::uint32_t header_p = o.p;
    std::string source;
    bool must_be_laplacian = o.laplacian;
    if (!o.graph_path.empty()) {
        std::ifstream in(o.graph_path);
        if (!in) throw InputError("cannot open '" + o.graph_path + "'");
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw InputError(o.graph_path + ": " + e.what());
        }
        m = j.contains("edges_12") ? laplacian(bipartite_from_json(j)) : laplacian(digraph_from_json(j));
        source = "graph";
        must_be_laplacian = true;
    } else {
        try {
            auto file = load_int_matrix(o.matrix_path);
            m = std::move(file.matrix);
            header_p = file.p;
        } catch (const ParseError& e) {
            throw ParseError(o.matrix_path + ": " + e.what());
        }
        source = must_be_laplacian ? "laplacian" : "matrix";
    }
    if (must_be_laplacian) (void)sandpile_invariants(m);  // rejects non-Laplacians

    if (!o.write_laplacian.empty()) {
        std::ofstream file(o.write_laplacian);
        if (!file) throw InputError("cannot write '" + o.write_laplacian + "'");
        write_matrix(file, m, header_p);
    }
    emit(out_opts, dump(snf_json(source, m, invariant_factors(m), header_p)), out);
    return kExitOk;
}

struct PmfOptions {
    std::uint32_t p = 2;
    std::string kind = "theorem";
    std::int64_t kmax = 10;
    std::size_t u = 0;
    double tol = kDefaultTolerance;
};

int cmd_pmf(const PmfOptions& o, const Output& out_opts, std::ostream& out) {
    const PmfKind kind = o.kind == "iid" ? PmfKind::iid : PmfKind::theorem;
    const auto table = pmf_table(Prime(o.p), kind, static_cast<std::size_t>(o.kmax), o.u, o.tol);
    std::ostringstream s;
    s.precision(17);
    s << "corank,probability\n";
    for (const auto& [corank, mass] : table.mass) s << corank << ',' << mass << '\n';
    s << "# truncation_error=" << table.truncation_error << '\n';
    emit(out_opts, s.str(), out);
    return kExitOk;
}

struct SimulateOptions {
    std::string statistic = "corank";
    std::size_t rows = 0;
    std::string compare = "auto";
};

int cmd_simulate(const ModelOptions& mo, const SimulateOptions& so, const Output& o, std::ostream& out) {
    ExperimentConfig cfg = make_config(mo);
    if (so.compare == "theorem") cfg.comparison = PmfKind::theorem;
    if (so.compare == "iid") cfg.comparison = PmfKind::iid;
    ExperimentReport report;
    if (so.statistic == "corank") {
        report = run_corank_experiment(cfg);
    } else if (so.statistic == "full-rank") {
        cfg.statistic = Statistic::full_rank_at;
        cfg.row_count = so.rows;
        report = run_full_rank_frequency(cfg);
    } else {
        cfg.statistic = Statistic::snf_sample;
        report = run_snf_sample(cfg);
    }
    emit(o, o.format == "csv" ? to_csv(report) : dump(to_json(report, o.timing)), out);
    return kExitOk;
}

int cmd_rank_evolution(const ModelOptions& mo, double delta, const Output& o, std::ostream& out) {
    ExperimentConfig cfg = make_config(mo);
    cfg.statistic = Statistic::rank_evolution;
    cfg.delta = delta;
    const auto report = run_rank_evolution(cfg);
    emit(o, o.format == "csv" ? to_csv(report) : dump(to_json(report, o.timing)), out);
    return kExitOk;
}

int cmd_phase_sweep(const ModelOptions& mo, const std::vector<double>& alphas, const std::vector<std::size_t>& ns,
                    const Output& o, std::ostream& out) {
    ExperimentConfig cfg = make_config(mo);
    if (cfg.model == Model::iid_rect) throw std::invalid_argument("phase-sweep needs a graph model");
    // Validate every cell up front so a bad grid fails before any work is done.
    for (double a : alphas) {
        for (std::size_t n : ns) {
            ExperimentConfig c = cfg;
            c.params.alpha = a;
            c.params.n = n;
            c.validate();
        }
    }
    const auto cells = run_phase_sweep(alphas, ns, cfg);
    json j{{"config", config_to_json(cfg)}, {"cells", to_json(cells)}};
    j["config"].erase("alpha");
    j["config"].erase("n");
    j["config"].erase("m");
    emit(o, o.format == "csv" ? to_csv(cells) : dump(j), out);
    return kExitOk;
}

struct StructureOptions {
    std::string input;
    std::size_t n = 0;
    std::optional<std::size_t> neg_sum_index;
    double q = 0.5;
    bool rho = false;
    bool support = false;
    bool zero_sum = false;
};

int cmd_structure(const StructureOptions& so, const Output& o, std::ostream& out) {
    GfMatrix vectors = [&] {
        try {
            return load_gf_matrix(so.input);
        } catch (const ParseError& e) {
            throw ParseError(so.input + ": " + e.what());
        }
    }();
    const bool all = !so.rho && !so.support && !so.zero_sum;
    LaplacianRowLaw law;
    law.n = so.n;
    law.total_dim = vectors.cols();
    law.neg_sum_index = so.neg_sum_index.value_or(so.n);
    law.q = so.q;
    law.p = vectors.prime();
    if (all || so.rho) law.validate();
    if (so.n > vectors.cols()) throw std::invalid_argument("--n exceeds the vector length");

    json j{{"p", law.p.value()}, {"n", law.n}, {"q", law.q}, {"dim", law.total_dim}};
    if (all || so.rho) j["neg_sum_index"] = law.neg_sum_index;
    if (all || so.zero_sum) j["zero_sum_prob"] = zero_sum_prob(law.n, law.q, law.p);
    json rows = json::array();
    if (all || so.rho || so.support) {
        for (std::size_t r = 0; r < vectors.rows(); ++r) {
            const GfVector w = vectors.row_vector(r);
            json row{{"index", r}};
            if (all || so.rho) row["rho_l"] = rho_L(w, law);
            if (all || so.support) row["min_nonconstant_support"] = min_nonconstant_support(w, law.n);
            rows.push_back(row);
        }
        j["vectors"] = rows;
    }
    emit(o, dump(j), out);
    return kExitOk;
}

int dispatch(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    const std::vector<std::string> args = expand_config(raw_args);

    CLI::App app{"Random directed bipartite Laplacians: corank statistics, pmfs and sandpile groups", "sandpile"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--config", "JSON file supplying any flag; the command line overrides it");

    ModelOptions model;
    Output output;

    auto* simulate = app.add_subcommand("simulate", "corank (or full-rank / snf) histogram of a random ensemble");
    SimulateOptions sim;
    add_model_options(*simulate, model);
    add_output_options(*simulate, output, true);
    simulate->add_option("--statistic", sim.statistic)
        ->check(CLI::IsMember({"corank", "full-rank", "snf"}))
        ->capture_default_str();
    simulate->add_option("--rows", sim.rows, "full-rank: leading rows tested (default n)");
    simulate->add_option("--compare", sim.compare, "reference pmf: auto | theorem | iid")
        ->check(CLI::IsMember({"auto", "theorem", "iid"}))
        ->capture_default_str();

    auto* pmf = app.add_subcommand("pmf", "limiting corank pmf as CSV");
    PmfOptions pmf_opts;
    pmf->add_option("--p", pmf_opts.p)->capture_default_str();
    pmf->add_option("--kind", pmf_opts.kind, "theorem | iid")
        ->check(CLI::IsMember({"theorem", "iid"}))
        ->capture_default_str();
    pmf->add_option("--kmax", pmf_opts.kmax)->check(CLI::NonNegativeNumber)->capture_default_str();
    pmf->add_option("--u", pmf_opts.u, "extra columns (iid kind)")->capture_default_str();
    pmf->add_option("--tol", pmf_opts.tol, "product truncation tolerance")->capture_default_str();
    pmf->add_option("--out", output.path);

    auto* snf = app.add_subcommand("snf", "Smith normal form / sandpile group of a matrix or graph");
    SnfOptions snf_opts;
    snf->add_option("--matrix", snf_opts.matrix_path, "matrix text file")->check(CLI::ExistingFile);
    snf->add_option("--graph", snf_opts.graph_path, "graph JSON file")->check(CLI::ExistingFile);
    snf->add_flag("--laplacian", snf_opts.laplacian, "reject matrices whose rows do not sum to zero");
    snf->add_option("--write-laplacian", snf_opts.write_laplacian, "also write the integer matrix to this file");
    snf->add_option("--p", snf_opts.p, "modulus for the --write-laplacian header")->capture_default_str();
    snf->add_option("--out", output.path);

    auto* evolution = app.add_subcommand("rank-evolution", "span-hit frequencies by codimension over the final rows");
    double delta = 0.25;
    add_model_options(*evolution, model);
    add_output_options(*evolution, output, true);
    evolution->add_option("--delta", delta, "observe the final floor(delta * n) rows")->capture_default_str();

    auto* sweep = app.add_subcommand("phase-sweep", "mean corank over an (alpha, n) grid");
    std::vector<double> alphas{0.25, 0.5, 1.0};
    std::vector<std::size_t> ns{40, 80};
    add_model_options(*sweep, model);
    add_output_options(*sweep, output, true);
    sweep->add_option("--alphas", alphas)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)->delimiter(',');
    sweep->add_option("--ns", ns)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)->delimiter(',');

    auto* structure = app.add_subcommand("structure", "rho_L, support and zero-sum diagnostics of vectors");
    StructureOptions st;
    structure->add_option("--input", st.input, "vectors as rows of a matrix text file")->required();
    structure->add_option("--n", st.n, "number of iid coordinates")->required();
    structure->add_option("--neg-sum-index", st.neg_sum_index, "0-based coordinate carrying -sum x_i (default n)");
    structure->add_option("--q", st.q)->capture_default_str();
    structure->add_flag("--rho-l", st.rho);
    structure->add_flag("--support", st.support);
    structure->add_flag("--zero-sum", st.zero_sum);
    structure->add_option("--out", output.path);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalidInput;
    }
    if (sweep->parsed() && (alphas.empty() || ns.empty())) throw InputError("--alphas and --ns must be non-empty");

    if (simulate->parsed()) return cmd_simulate(model, sim, output, out);
    if (pmf->parsed()) return cmd_pmf(pmf_opts, output, out);
    if (snf->parsed()) return cmd_snf(snf_opts, output, out);
    if (evolution->parsed()) return cmd_rank_evolution(model, delta, output, out);
    if (sweep->parsed()) return cmd_phase_sweep(model, alphas, ns, output, out);
    return cmd_structure(st, output, out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(args, out, err);
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << '\n';
    } catch (const std::length_error& e) {
        err << "invalid input: " << e.what() << '\n';
    } catch (const nlohmann::json::exception& e) {
        err << "invalid input: " << e.what() << '\n';
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitInvalidInput;
}

}  // namespace sandpile::cli

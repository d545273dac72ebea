#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "sandpile/graph.hpp"
#include "sandpile/matrix_io.hpp"
#include "sandpile/montecarlo.hpp"
#include "sandpile/rng.hpp"

using namespace sandpile;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = fs::temp_directory_path() / ("sandpile_cli_test_" + std::to_string(::getpid()) + "_" +
                                             std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string& name, const std::string& contents) const {
        const auto p = path_ / name;
        std::ofstream(p) << contents;
        return p.string();
    }
    std::string path(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("simulate is deterministic and threads only change timing") {
    const std::vector<std::string> base{"simulate", "--model", "bipartite", "--p", "2", "--q", "0.5", "--alpha",
                                        "1.0", "--n", "64", "--trials", "1000", "--seed", "7"};
    const auto a = run(base);
    const auto b = run(base);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    auto threaded = base;
    threaded.insert(threaded.end(), {"--threads", "4"});
    CHECK(run(threaded).out == a.out);
    threaded.back() = "auto";
    CHECK(run(threaded).out == a.out);

    const auto j = json::parse(a.out);
    CHECK(j["config"]["m"] == 64);
    CHECK(j["config"]["trials"] == 1000);
    CHECK_FALSE(j.contains("wall_time_ms"));
}

TEST_CASE("simulate report tv distance matches its own counts") {
    const auto r = run({"simulate", "--n", "32", "--trials", "3000", "--seed", "11"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    const double trials = j["config"]["trials"];
    std::map<std::size_t, double> empirical;
    for (const auto& [k, c] : j["counts"].items()) empirical[std::stoul(k)] = c.get<double>() / trials;
    const auto theory = pmf_table(Prime(2), PmfKind::theorem, 40);
    double tv = 0.0;
    for (std::size_t k = 0; k <= 60; ++k) {
        const double e = empirical.count(k) ? empirical[k] : 0.0;
        tv += std::abs(e - theory.at(k));
    }
    CHECK(j["tv_distance"].get<double>() == doctest::Approx(tv / 2).epsilon(1e-12));
}

TEST_CASE("invalid configuration exits with status 2") {
    const auto alpha = run({"simulate", "--alpha", "0"});
    CHECK(alpha.code == 2);
    CHECK(alpha.err.find("alpha") != std::string::npos);
    CHECK(run({"simulate", "--p", "4"}).code == 2);
    CHECK(run({"simulate", "--q", "1.5"}).code == 2);
    CHECK(run({"simulate", "--threads", "zero"}).code == 2);
    CHECK(run({"simulate", "--model", "tree"}).code == 2);
    CHECK(run({"pmf", "--kmax", "-1"}).code == 2);
    CHECK(run({"bogus"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("pmf tables") {
    const auto theorem = run({"pmf", "--p", "2", "--kind", "theorem", "--kmax", "5"});
    REQUIRE(theorem.code == 0);
    std::istringstream lines(theorem.out);
    std::string header, first;
    std::getline(lines, header);
    std::getline(lines, first);
    CHECK(header == "corank,probability");
    CHECK(first.rfind("1,0.577576", 0) == 0);
    CHECK(theorem.out.find("# truncation_error=") != std::string::npos);

    const auto iid = run({"pmf", "--p", "2", "--kind", "iid", "--u", "1", "--kmax", "5"});
    CHECK(iid.out == theorem.out);
}

TEST_CASE("snf of graphs and matrices") {
    TempDir dir;
    const auto k3 = dir.file("k3.json", to_json(Digraph::complete(3)).dump());
    const auto r = run({"snf", "--graph", k3});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["torsion"] == json::array({3}));
    CHECK(j["free_rank"] == 1);
    CHECK(j["flagged"] == false);
    CHECK(j["p_rank"]["3"] == 1);

    const auto zero = dir.file("zero.txt", "2 3 3\n0 0 0\n0 0 0\n0 0 0\n");
    const auto z = json::parse(run({"snf", "--matrix", zero}).out);
    CHECK(z["free_rank"] == 3);
    CHECK(z["flagged"] == true);

    const auto bad = dir.file("bad.txt", "2 2 2\n1 0\n0 q\n");
    const auto b = run({"snf", "--matrix", bad});
    CHECK(b.code == 2);
    CHECK(b.err.find("line 3") != std::string::npos);

    const auto not_laplacian = dir.file("nl.txt", "2 2 2\n1 0\n0 0\n");
    CHECK(run({"snf", "--matrix", not_laplacian, "--laplacian"}).code == 2);
    CHECK(run({"snf", "--matrix", dir.path("missing.txt")}).code == 2);
}

TEST_CASE("written matrices parse back unchanged") {
    TempDir dir;
    Rng rng(4);
    ModelParams mp;
    mp.n = 9;
    mp.alpha = 0.5;
    const auto g = sample_bipartite_digraph(mp, rng);
    const auto graph = dir.file("g.json", to_json(g).dump());
    const auto written = dir.path("l.txt");
    REQUIRE(run({"snf", "--graph", graph, "--write-laplacian", written, "--p", "3"}).code == 0);
    const auto back = load_int_matrix(written);
    CHECK(back.p == 3);
    CHECK(back.matrix == laplacian(g));
    CHECK(json::parse(run({"snf", "--matrix", written, "--laplacian"}).out)["torsion"] ==
          json::parse(run({"snf", "--graph", graph}).out)["torsion"]);
}

TEST_CASE("rank-evolution reports expected frequencies") {
    const auto r = run({"rank-evolution", "--n", "24", "--trials", "200", "--seed", "2"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    REQUIRE(!j["records"].empty());
    for (const auto& rec : j["records"]) {
        const std::size_t l = rec["codim"];
        if (l >= 1) CHECK(rec["expected"].get<double>() == doctest::Approx(std::pow(2.0, -double(l - 1))));
    }
    const auto csv = run({"rank-evolution", "--n", "24", "--trials", "50", "--format", "csv"});
    CHECK(csv.out.find("expected") != std::string::npos);
}

TEST_CASE("phase-sweep grid shape") {
    const auto r = run({"phase-sweep", "--alphas", "0.25,0.5,1.0", "--ns", "40,80", "--trials", "10", "--seed", "1"});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["cells"].size() == 6);
    CHECK(run({"phase-sweep", "--alphas", "0.01", "--ns", "40"}).code == 2);
}

TEST_CASE("structure diagnostics") {
    TempDir dir;
    for (std::uint32_t p : {2u, 3u, 5u}) {
        const auto ones = dir.file("ones.txt", std::to_string(p) + " 1 6\n1 1 1 1 1 1\n");
        const auto r = run({"structure", "--input", ones, "--n", "3", "--rho-l"});
        REQUIRE(r.code == 0);
        CHECK(json::parse(r.out)["vectors"][0]["rho_l"].get<double>() == doctest::Approx(1.0 - 1.0 / p));
    }
    const auto e1 = dir.file("e1.txt", "2 1 8\n1 0 0 0 0 0 0 0\n");
    const auto all = json::parse(run({"structure", "--input", e1, "--n", "4"}).out);
    CHECK(all["vectors"][0]["min_nonconstant_support"] == 1);
    CHECK(all["zero_sum_prob"].get<double>() == doctest::Approx(0.5));
    CHECK(run({"structure", "--input", e1, "--n", "4", "--neg-sum-index", "2"}).code == 2);
}

TEST_CASE("config files supply flags and the command line overrides them") {
    TempDir dir;
    const auto cfg = dir.file("run.json", R"({"n": 12, "trials": 40, "seed": 5, "format": "json"})");
    const auto from_file = run({"simulate", "--config", cfg});
    REQUIRE(from_file.code == 0);
    CHECK(from_file.out == run({"simulate", "--n", "12", "--trials", "40", "--seed", "5"}).out);

    const auto overridden = json::parse(run({"simulate", "--config", cfg, "--n", "10"}).out);
    CHECK(overridden["config"]["n"] == 10);
    CHECK(overridden["config"]["trials"] == 40);

    const auto sweep = dir.file("sweep.json", R"({"alphas": [0.5, 1.0], "ns": [8], "trials": 4})");
    CHECK(json::parse(run({"phase-sweep", "--config", sweep}).out)["cells"].size() == 2);

    CHECK(run({"simulate", "--config", dir.path("nope.json")}).code == 2);
    CHECK(run({"simulate", "--config", dir.file("junk.json", "{")}).code == 2);
    CHECK(run({"simulate", "--config", dir.file("unknown.json", R"({"colour": 1})")}).code == 2);
}

TEST_CASE("output file") {
    TempDir dir;
    const auto path = dir.path("pmf.csv");
    const auto r = run({"pmf", "--kmax", "2", "--out", path});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    CHECK(slurp(path).rfind("corank,probability\n", 0) == 0);
}

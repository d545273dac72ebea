#include "sandpile/structure.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <map>
#include <stdexcept>
#include <string>

#include "sandpile/stats.hpp"

namespace sandpile {

void LaplacianRowLaw::validate() const {
    if (n >= total_dim) throw std::invalid_argument("law needs n < total_dim");
    if (neg_sum_index < n || neg_sum_index >= total_dim) {
        throw std::invalid_argument("neg_sum_index must lie in [n, total_dim)");
    }
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("q must lie in [0, 1]");
}

namespace {

/// Distribution of sum_i x_i c_i mod p for iid Bernoulli(q) x_i.
std::vector<double> weighted_sum_distribution(std::span<const Residue> coeffs, double q, Prime p) {
    const std::size_t pv = p.value();
    std::vector<double> dist(pv, 0.0), next(pv);
    dist[0] = 1.0;
    for (Residue c : coeffs) {
        if (c == 0) continue;
        for (std::size_t r = 0; r < pv; ++r) next[r] = (1.0 - q) * dist[r] + q * dist[(r + pv - c) % pv];
        dist.swap(next);
    }
    return dist;
}

double max_deviation(const std::vector<double>& dist) {
    const double uniform = 1.0 / static_cast<double>(dist.size());
    double worst = 0.0;
    for (double x : dist) worst = std::max(worst, std::abs(x - uniform));
    return worst;
}

void check_vector(const GfVector& w, const LaplacianRowLaw& law) {
    if (w.size() != law.total_dim) {
        throw std::invalid_argument("vector length " + std::to_string(w.size()) + " does not match law dimension " +
                                    std::to_string(law.total_dim));
    }
    if (w.prime() != law.p) throw std::invalid_argument("vector modulus does not match law");
}

}  // namespace

double rho_L(const GfVector& w, const LaplacianRowLaw& law) {
    law.validate();
    check_vector(w, law);
    const Residue shift = w[law.neg_sum_index];
    std::vector<Residue> coeffs(law.n);
    for (std::size_t i = 0; i < law.n; ++i) coeffs[i] = law.p.sub(w[i], shift);
    return max_deviation(weighted_sum_distribution(coeffs, law.q, law.p));
}

std::size_t min_nonconstant_support(const GfVector& w, std::size_t n) {
    if (n > w.size()) throw std::invalid_argument("support window exceeds vector length");
    if (n == 0) return 0;
    std::map<Residue, std::size_t> multiplicity;
    for (std::size_t i = 0; i < n; ++i) ++multiplicity[w[i]];
    std::size_t most = 0;
    for (const auto& [value, count] : multiplicity) most = std::max(most, count);
    return n - most;
}

double zero_sum_prob(std::size_t n, double q, Prime p) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("q must lie in [0, 1]");
    const std::vector<Residue> ones(n, 1);
    return weighted_sum_distribution(ones, q, p)[0];
}

double zero_sum_deviation(std::size_t n, double q, Prime p) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("q must lie in [0, 1]");
    const double pv = static_cast<double>(p.value());
    double sum = 0.0;
    for (std::uint32_t t = 1; t < p.value(); ++t) {
        const std::complex<double> z = (1.0 - q) + q * std::polar(1.0, 2.0 * std::numbers::pi * t / pv);
        const double nd = static_cast<double>(n);
        sum += std::pow(std::abs(z), nd) * std::cos(nd * std::arg(z));
    }
    return sum / pv;
}

double odlyzko_bound(double beta, std::size_t codim) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in [0, 1]");
    return std::pow(1.0 - beta, static_cast<double>(codim));
}

OdlyzkoCheck odlyzko_empirical_check(const GfMatrix& constraints, double beta, const VectorSampler& sample,
                                     std::size_t trials, Rng& rng) {
    OdlyzkoCheck out;
    out.trials = trials;
    out.codim = rank_and_corank(constraints).rank;
    out.bound = odlyzko_bound(beta, out.codim);
    for (std::size_t t = 0; t < trials; ++t) {
        const GfVector x = sample(rng);
        const GfVector image = constraints.apply(x);
        if (std::ranges::all_of(image.entries(), [](Residue r) { return r == 0; })) ++out.hits;
    }
    if (trials > 0) {
        out.frequency = static_cast<double>(out.hits) / static_cast<double>(trials);
        out.sigma_hat = std::sqrt(out.frequency * (1.0 - out.frequency) / static_cast<double>(trials));
    }
    out.within_bound = out.frequency <= out.bound + 4.0 * out.sigma_hat;
    return out;
}

VectorSampler bernoulli_vector_sampler(Prime p, std::size_t size, double q) {
    return [p, size, coin = Bernoulli(q)](Rng& rng) {
        std::vector<Residue> entries(size);
        for (auto& e : entries) e = coin(rng) ? 1 : 0;
        return GfVector(p, std::move(entries));
    };
}

std::vector<GfVector> orthogonal_complement(std::span<const GfVector> basis, Prime p, std::size_t dim) {
    return nullspace_basis(GfMatrix::from_rows(p, dim, basis));
}

double subspace_hit_prob_bruteforce(std::span<const GfVector> basis, const LaplacianRowLaw& law) {
    law.validate();
    if (law.n > kMaxEnumeratedCoordinates) {
        throw std::length_error("instance too large for enumeration: n = " + std::to_string(law.n) +
                                " exceeds " + std::to_string(kMaxEnumeratedCoordinates));
    }
    for (const auto& v : basis) check_vector(v, law);

    const Prime p = law.p;
    const auto normals = orthogonal_complement(basis, p, law.total_dim);
    // X . u = sum_{i in S} (u_i - u_j) for the support S of the iid block.
    std::vector<std::vector<Residue>> shifted;
    for (const auto& u : normals) {
        std::vector<Residue> c(law.n);
        for (std::size_t i = 0; i < law.n; ++i) c[i] = p.sub(u[i], u[law.neg_sum_index]);
        shifted.push_back(std::move(c));
    }

    double hit = 0.0;
    const std::uint64_t supports = std::uint64_t{1} << law.n;
    for (std::uint64_t s = 0; s < supports; ++s) {
        bool inside = true;
        for (const auto& c : shifted) {
            Residue dot = 0;
            for (std::size_t i = 0; i < law.n; ++i) {
                if ((s >> i) & 1u) dot = p.add(dot, c[i]);
            }
            if (dot != 0) {
                inside = false;
                break;
            }
        }
        if (!inside) continue;
        const int weight = std::popcount(s);
        hit += std::pow(law.q, weight) * std::pow(1.0 - law.q, static_cast<int>(law.n) - weight);
    }
    return hit;
}

double max_rho_over_nonconstant_normals(std::span<const GfVector> basis, const LaplacianRowLaw& law) {
    law.validate();
    for (const auto& v : basis) check_vector(v, law);
    const Prime p = law.p;
    const auto normals = orthogonal_complement(basis, p, law.total_dim);
    const double size = std::pow(static_cast<double>(p.value()), static_cast<double>(normals.size()));
    if (size > static_cast<double>(1u << 20)) throw std::length_error("orthogonal complement too large to enumerate");

    std::vector<Residue> coeffs(normals.size(), 0);
    double worst = 0.0;
    for (;;) {
        std::vector<Residue> w(law.total_dim, 0);
        for (std::size_t k = 0; k < normals.size(); ++k) {
            if (coeffs[k] == 0) continue;
            for (std::size_t i = 0; i < law.total_dim; ++i) w[i] = p.add(w[i], p.mul(coeffs[k], normals[k][i]));
        }
        const bool constant = std::ranges::all_of(w, [&](Residue x) { return x == w[0]; });
        if (!constant) worst = std::max(worst, rho_L(GfVector(p, std::move(w)), law));

        std::size_t k = 0;
        while (k < coeffs.size() && ++coeffs[k] == p.value()) coeffs[k++] = 0;
        if (k == coeffs.size()) break;
    }
    return worst;
}

MinEntropyEstimate min_entropy_estimate(const std::function<MinEntropySample(Rng&)>& sample, std::size_t trials,
                                        Rng& rng, std::size_t min_class_count) {
    std::map<std::uint64_t, std::map<Residue, std::size_t>> table;
    for (std::size_t t = 0; t < trials; ++t) {
        const auto s = sample(rng);
        ++table[s.condition][s.value];
    }
    MinEntropyEstimate out;
    double worst_upper = 0.0;
    for (const auto& [condition, values] : table) {
        std::size_t total = 0;
        for (const auto& [v, c] : values) total += c;
        if (total < min_class_count) continue;
        ++out.classes_used;
        for (const auto& [v, c] : values) {
            worst_upper = std::max(worst_upper, wilson_interval(c, total).upper);
            out.max_frequency = std::max(out.max_frequency, static_cast<double>(c) / static_cast<double>(total));
        }
    }
    out.beta_hat = out.classes_used == 0 ? 0.0 : std::max(0.0, 1.0 - worst_upper);
    return out;
}

}  // namespace sandpile

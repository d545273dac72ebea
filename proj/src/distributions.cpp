#include "sandpile/distributions.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sandpile {

double q_product(Prime p, std::size_t from, double tol) {
    if (from < 1) throw std::invalid_argument("q_product needs from >= 1");
    if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("q_product needs 0 < tol < 1");
    const double base = p.value();
    double product = 1.0;
    for (std::size_t i = from;; ++i) {
        const double term = std::pow(base, -static_cast<double>(i));
        product *= 1.0 - term;
        // Remaining tail: sum_{j > i} p^-j = p^-i / (p - 1).
        if (term / (base - 1.0) < tol) break;
    }
    return product;
}

double finite_q_product(Prime p, std::size_t count) {
    const double base = p.value();
    double product = 1.0;
    for (std::size_t i = 1; i <= count; ++i) product *= 1.0 - std::pow(base, -static_cast<double>(i));
    return product;
}

double theorem_pmf(Prime p, std::size_t k, double tol) {
    const double kk = static_cast<double>(k);
    const double weight = std::pow(static_cast<double>(p.value()), -(kk * kk + kk));
    return weight * q_product(p, k + 2, tol) / finite_q_product(p, k);
}

double iid_pmf(Prime p, std::size_t u, std::size_t k, double tol) {
    const double kk = static_cast<double>(k);
    const double weight = std::pow(static_cast<double>(p.value()), -(kk * (static_cast<double>(u) + kk)));
    // The factors i = k+1..k+u cancel between the two products.
    return weight * q_product(p, k + u + 1, tol) / finite_q_product(p, k);
}

std::string to_string(PmfKind kind) {
    switch (kind) {
        case PmfKind::theorem: return "theorem";
        case PmfKind::iid: return "iid";
        case PmfKind::empirical: return "empirical";
    }
    return "unknown";
}

double CorankPmf::total() const {
    return std::accumulate(mass.begin(), mass.end(), 0.0,
                           [](double acc, const auto& kv) { return acc + kv.second; });
}

CorankPmf pmf_table(Prime p, PmfKind kind, std::size_t k_max, std::size_t u, double tol) {
    CorankPmf pmf;
    pmf.p = p;
    pmf.kind = kind;
    switch (kind) {
        case PmfKind::theorem:
            for (std::size_t k = 0; k <= k_max; ++k) pmf.mass[1 + k] = theorem_pmf(p, k, tol);
            break;
        case PmfKind::iid:
            pmf.u = u;
            for (std::size_t k = 0; k <= k_max; ++k) pmf.mass[u + k] = iid_pmf(p, u, k, tol);
            break;
        case PmfKind::empirical:
            throw std::invalid_argument("an empirical pmf cannot be tabulated");
    }
    pmf.truncation_error = 1.0 - pmf.total();
    return pmf;
}

}  // namespace sandpile

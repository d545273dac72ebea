#include "sandpile/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace sandpile {

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (phat + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    // The endpoints at 0 and 1 are exact; the formula leaves round-off there.
    const double lower = successes == 0 ? 0.0 : std::max(0.0, center - half);
    const double upper = successes == trials ? 1.0 : std::min(1.0, center + half);
    return {lower, upper};
}

ChiSquare chi_square(const std::map<std::size_t, std::size_t>& counts,
                     const std::map<std::size_t, double>& expected, double min_expected) {
    double total = 0.0;
    for (const auto& [k, c] : counts) total += static_cast<double>(c);
    if (total == 0.0 || expected.empty()) return {};

    std::size_t observed_inside = 0;
    struct Bin {
        double observed = 0.0;
        double expected = 0.0;
    };
    std::vector<Bin> bins;
    Bin current;
    for (const auto& [k, prob] : expected) {
        const auto it = counts.find(k);
        const std::size_t c = it == counts.end() ? 0 : it->second;
        observed_inside += c;
        current.observed += static_cast<double>(c);
        current.expected += prob * total;
        if (current.expected >= min_expected) {
            bins.push_back(current);
            current = {};
        }
    }
    const double leftover_prob =
        1.0 - std::accumulate(expected.begin(), expected.end(), 0.0,
                              [](double acc, const auto& kv) { return acc + kv.second; });
    current.observed += total - static_cast<double>(observed_inside);
    current.expected += std::max(0.0, leftover_prob) * total;
    if (bins.empty()) {
        bins.push_back(current);
    } else {
        bins.back().observed += current.observed;
        bins.back().expected += current.expected;
    }

    ChiSquare out;
    for (const auto& b : bins) {
        if (b.expected > 0.0) out.statistic += (b.observed - b.expected) * (b.observed - b.expected) / b.expected;
    }
    out.dof = bins.size() > 1 ? bins.size() - 1 : 0;
    if (out.dof > 0) {
        const boost::math::chi_squared dist(static_cast<double>(out.dof));
        out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
    }
    return out;
}

}  // namespace sandpile

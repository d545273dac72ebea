#pragma once

#include <cstddef>
#include <map>

namespace sandpile {

inline constexpr double kZ95 = 1.959963984540054;

struct WilsonInterval {
    double lower;
    double upper;

    [[nodiscard]] double half_width() const noexcept { return 0.5 * (upper - lower); }
};

/// Wilson score interval for a binomial proportion; [0, 1] when trials == 0.
[[nodiscard]] WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z = kZ95);

struct ChiSquare {
    double statistic = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;
};

/// Pearson goodness of fit of `counts` against `expected` probabilities.
/// Outcomes are walked in increasing key order and merged into the next
/// outcome until each pooled bin expects at least `min_expected`
/// observations; a short final bin is merged back into its predecessor, and
/// everything outside `expected` joins the last bin.
[[nodiscard]] ChiSquare chi_square(const std::map<std::size_t, std::size_t>& counts,
                                   const std::map<std::size_t, double>& expected,
                                   double min_expected = 5.0);

}  // namespace sandpile

#pragma once

#include <cstddef>
#include <vector>

#include "sandpile/gf_matrix.hpp"
#include "sandpile/int_matrix.hpp"

namespace sandpile {

/// Invariant factors of a cokernel Z^rows / M Z^cols.
///
/// `diag` lists the nonzero invariant factors d_1 | d_2 | ... | d_r (units
/// included), `free_rank` counts the Z summands.
struct InvariantFactors {
    std::vector<BigInt> diag;
    std::size_t free_rank = 0;

    /// Factors greater than one: the cyclic decomposition of the torsion part.
    [[nodiscard]] std::vector<BigInt> torsion() const;

    friend bool operator==(const InvariantFactors&, const InvariantFactors&) = default;
};

struct SmithForm {
    InvariantFactors factors;
    IntMatrix u;  // rows x rows, unimodular
    IntMatrix v;  // cols x cols, unimodular; u * m * v = diag(factors.diag)
};

/// Smith normal form by repeated minimal-absolute-value pivoting.
[[nodiscard]] SmithForm smith_normal_form(const IntMatrix& m);

/// Same factors as smith_normal_form without accumulating the transforms.
[[nodiscard]] InvariantFactors invariant_factors(const IntMatrix& m);

/// Sandpile group of a Laplacian: cokernel invariants with one Z summand
/// removed. A remaining free_rank > 0 means the group is not finite (for
/// example a disconnected graph) and is reported via `has_extra_free_rank`.
struct SandpileGroup {
    InvariantFactors factors;

    [[nodiscard]] bool has_extra_free_rank() const noexcept { return factors.free_rank > 0; }
    [[nodiscard]] std::vector<BigInt> torsion() const { return factors.torsion(); }
};

/// Throws std::invalid_argument if `laplacian` is not square or some row
/// does not sum to zero.
[[nodiscard]] SandpileGroup sandpile_invariants(const IntMatrix& laplacian);

/// Number of listed (nonzero) invariant factors divisible by p.
[[nodiscard]] std::size_t p_rank(const InvariantFactors& f, Prime p);

}  // namespace sandpile

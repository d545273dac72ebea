#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "sandpile/gf_matrix.hpp"
#include "sandpile/int_matrix.hpp"

// Shared matrix text format:
//
//   p rows cols
//   a_11 a_12 ... (rows * cols whitespace-separated integers)
//
// Entries are reduced mod p when loaded as a GfMatrix and kept verbatim when
// loaded as an IntMatrix.

namespace sandpile {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MatrixHeader {
    std::uint32_t p;
    std::size_t rows;
    std::size_t cols;
};

/// Integer matrix plus the modulus named in its header.
struct IntMatrixFile {
    std::uint32_t p;
    IntMatrix matrix;
};

[[nodiscard]] GfMatrix read_gf_matrix(std::istream& in);
[[nodiscard]] IntMatrixFile read_int_matrix(std::istream& in);
[[nodiscard]] GfMatrix load_gf_matrix(const std::string& path);
[[nodiscard]] IntMatrixFile load_int_matrix(const std::string& path);

void write_matrix(std::ostream& out, const GfMatrix& m);
/// `p` is written into the header; entries are written as-is.
void write_matrix(std::ostream& out, const IntMatrix& m, std::uint32_t p);

}  // namespace sandpile

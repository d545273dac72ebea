#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sandpile::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInvalidInput = 2;

/// Runs one command line. `args` excludes the program name. Reports go to
/// `out` unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sandpile::cli

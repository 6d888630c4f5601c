#pragma once

#include <iosfwd>

namespace boxbp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNotOptimal = 2;   // solve/denoise: Infeasible or ToleranceNotMet
inline constexpr int kExitNspFails = 3;
inline constexpr int kExitError = 1;        // runtime failure such as an LP breakdown
inline constexpr int kExitBadInput = 64;    // usage errors and malformed input files

/// Entry point behind the boxbp executable.  Results go to `out` unless an
/// --out file is given; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace boxbp::cli

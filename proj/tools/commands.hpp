// relent command-line front end. Exit codes: 0 ok, 1 input error,
// 2 an optimiser did not converge.

#pragma once

#include <iosfwd>

namespace relent::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitUnconverged = 2;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace relent::cli

#pragma once

#include <cstdint>

namespace dollarex {

// log(n!). Exact cumulative table below the Stirling crossover, then the
// Stirling series through the 1/(360 n^3) term (absolute error < 1e-15 there).
double log_factorial(std::uint64_t n);

inline constexpr std::uint64_t kLogFactorialTableSize = 256;

}  // namespace dollarex

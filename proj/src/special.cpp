#include "dollarex/special.hpp"

#include <array>
#include <cmath>

namespace dollarex {
namespace {

const std::array<double, kLogFactorialTableSize>& log_factorial_table() {
  static const auto table = [] {
    std::array<double, kLogFactorialTableSize> t{};
    double acc = 0.0;
    for (std::uint64_t n = 1; n < kLogFactorialTableSize; ++n) {
      acc += std::log(static_cast<double>(n));
      t[n] = acc;
    }
    return t;
  }();
  return table;
}

}  // namespace

double log_factorial(std::uint64_t n) {
  if (n < kLogFactorialTableSize) return log_factorial_table()[n];
  const double x = static_cast<double>(n);
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  return x * std::log(x) - x + 0.5 * std::log(2.0 * M_PI * x) +
         inv * (1.0 / 12.0 - inv2 / 360.0);
}

}  // namespace dollarex

#include "dollarex/int_dist.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dollarex {

IntDist::IntDist(std::vector<double> pmf) : pmf_(std::move(pmf)) {
  if (pmf_.empty()) throw std::invalid_argument("IntDist: empty pmf");
  cdf_.resize(pmf_.size());
  double acc = 0.0;
  for (std::size_t n = 0; n < pmf_.size(); ++n) {
    if (!(pmf_[n] >= 0.0) || !std::isfinite(pmf_[n]))
      throw std::invalid_argument("IntDist: pmf entries must be finite and nonnegative");
    acc += pmf_[n];
    cdf_[n] = acc;
  }
}

IntDist IntDist::delta(std::size_t n) {
  std::vector<double> pmf(n + 1, 0.0);
  pmf[n] = 1.0;
  return IntDist(std::move(pmf));
}

IntDist IntDist::from_counts(std::span<const std::uint64_t> counts) {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) throw std::invalid_argument("IntDist::from_counts: no observations");
  std::size_t last = counts.size();
  while (last > 1 && counts[last - 1] == 0) --last;
  std::vector<double> pmf(last);
  for (std::size_t n = 0; n < last; ++n)
    pmf[n] = static_cast<double>(counts[n]) / static_cast<double>(total);
  return IntDist(std::move(pmf));
}

IntDist IntDist::padded(std::size_t n_max) const {
  std::vector<double> pmf = pmf_;
  pmf.resize(n_max + 1, 0.0);
  return IntDist(std::move(pmf));
}

double IntDist::mean() const {
  double m = 0.0;
  for (std::size_t n = 0; n < pmf_.size(); ++n) m += static_cast<double>(n) * pmf_[n];
  return m;
}

std::size_t IntDist::mode() const {
  return static_cast<std::size_t>(std::max_element(pmf_.begin(), pmf_.end()) - pmf_.begin());
}

}  // namespace dollarex

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dollarex {

// Probability mass function on {0, ..., n_max} with a cached CDF.
class IntDist {
 public:
  IntDist() = default;
  // Throws std::invalid_argument on empty input or negative/non-finite entries.
  explicit IntDist(std::vector<double> pmf);

  static IntDist delta(std::size_t n);
  // Normalized empirical pmf from occurrence counts (index = value).
  static IntDist from_counts(std::span<const std::uint64_t> counts);

  std::size_t n_max() const { return pmf_.size() - 1; }
  std::size_t size() const { return pmf_.size(); }
  bool empty() const { return pmf_.empty(); }

  // Zero outside the stored window.
  double operator[](std::size_t n) const { return n < pmf_.size() ? pmf_[n] : 0.0; }
  // P(X <= n); equals mass() beyond the window.
  double cdf(std::size_t n) const { return n < cdf_.size() ? cdf_[n] : mass(); }

  // Copy zero-padded (or truncated) to {0, ..., n_max}.
  IntDist padded(std::size_t n_max) const;

  double mass() const { return cdf_.empty() ? 0.0 : cdf_.back(); }
  double mean() const;
  std::size_t mode() const;

  const std::vector<double>& pmf() const { return pmf_; }

 private:
  std::vector<double> pmf_;
  std::vector<double> cdf_;
};

}  // namespace dollarex

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dollarex/int_dist.hpp"

namespace dollarex {

// Tolerance on |mass - 1| accepted by the distance functions.
inline constexpr double kMassTolerance = 1e-8;

/// Wasserstein-1 distance between two distributions on the nonnegative
/// integers, computed as the L1 distance between their CDFs. Both inputs are
/// zero-padded to a common window. Throws std::invalid_argument if the masses
/// differ from 1 (or from each other) by more than kMassTolerance.
double w1_int(const IntDist& p, const IntDist& q);

// Mean of per-coordinate coupling costs: the W1 upper bound induced by
// coupling each coordinate separately, under the 1/d-normalized cost.
double w1_product_upper(std::span<const double> per_coordinate_costs);

double tv_distance(const IntDist& p, const IntDist& q);

// Binomial(trials, prob) restricted to {0, ..., n_max}; n_max defaults to trials.
IntDist binomial_pmf(std::uint64_t trials, double prob, std::optional<std::size_t> n_max = {});
// Poisson(mean) on {0, ..., n_max}, not renormalized.
IntDist poisson_pmf(double mean, std::size_t n_max);

struct Summary {
  double mean = 0.0;
  double variance = 0.0;  // sample variance (n - 1 denominator)
  std::optional<double> se;  // absent when count < 2
  std::uint64_t count = 0;
};

// Welford accumulator; merge() uses Chan's pairwise combination.
class StreamingStats {
 public:
  void observe(double x);
  void merge(const StreamingStats& other);
  Summary summarize() const;

  std::uint64_t count() const { return count_; }
  double mean() const { return mean_; }
  double variance() const;
  double min() const { return min_; }
  double max() const { return max_; }

 private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double min_ = 0.0;
  double max_ = 0.0;
};

// Counts of observed values, one histogram per replication.
using Histogram = std::vector<std::uint64_t>;

// Delete-one-replication jackknife standard error of W1(pooled empirical,
// reference), where the pooled law is built from all histograms. Requires at
// least two replications.
double jackknife_w1_se(std::span<const Histogram> per_replication, const IntDist& reference);

// Pools histograms into a normalized empirical pmf.
IntDist pool_histograms(std::span<const Histogram> per_replication);

// Ordinary least-squares fit y = intercept + slope * x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace dollarex

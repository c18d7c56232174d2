#include "dollarex/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "dollarex/special.hpp"

namespace dollarex {

double w1_int(const IntDist& p, const IntDist& q) {
  if (p.empty() || q.empty()) throw std::invalid_argument("w1_int: empty distribution");
  if (std::abs(p.mass() - 1.0) > kMassTolerance || std::abs(q.mass() - 1.0) > kMassTolerance)
    throw std::invalid_argument("w1_int: masses must be within tolerance of 1");
  const std::size_t window = std::max(p.size(), q.size());
  double total = 0.0;
  // The CDF difference past the common window is the (tiny) mass mismatch,
  // which carries no transport cost.
  for (std::size_t n = 0; n + 1 < window; ++n) total += std::abs(p.cdf(n) - q.cdf(n));
  return total;
}

double w1_product_upper(std::span<const double> per_coordinate_costs) {
  if (per_coordinate_costs.empty()) throw std::invalid_argument("w1_product_upper: no coordinates");
  const double sum = std::accumulate(per_coordinate_costs.begin(), per_coordinate_costs.end(), 0.0);
  return sum / static_cast<double>(per_coordinate_costs.size());
}

double tv_distance(const IntDist& p, const IntDist& q) {
  const std::size_t window = std::max(p.size(), q.size());
  double total = 0.0;
  for (std::size_t n = 0; n < window; ++n) total += std::abs(p[n] - q[n]);
  return 0.5 * total;
}

IntDist binomial_pmf(std::uint64_t trials, double prob, std::optional<std::size_t> n_max) {
  if (!(prob >= 0.0 && prob <= 1.0)) throw std::invalid_argument("binomial_pmf: prob outside [0, 1]");
  const std::size_t top = std::min<std::size_t>(n_max.value_or(trials), trials);
  std::vector<double> pmf(n_max.value_or(trials) + 1, 0.0);
  if (prob == 0.0 || prob == 1.0) {
    const std::size_t at = prob == 0.0 ? 0 : trials;
    if (at < pmf.size()) pmf[at] = 1.0;
    return IntDist(std::move(pmf));
  }
  const double lp = std::log(prob);
  const double lq = std::log1p(-prob);
  const double lf = log_factorial(trials);
  for (std::size_t k = 0; k <= top; ++k) {
    const double logp = lf - log_factorial(k) - log_factorial(trials - k) +
                        static_cast<double>(k) * lp + static_cast<double>(trials - k) * lq;
    pmf[k] = std::exp(logp);
  }
  return IntDist(std::move(pmf));
}

IntDist poisson_pmf(double mean, std::size_t n_max) {
  if (!(mean > 0.0) || !std::isfinite(mean)) throw std::invalid_argument("poisson_pmf: mean must be positive");
  std::vector<double> pmf(n_max + 1);
  const double lm = std::log(mean);
  for (std::size_t n = 0; n <= n_max; ++n)
    pmf[n] = std::exp(static_cast<double>(n) * lm - mean - log_factorial(n));
  return IntDist(std::move(pmf));
}

void StreamingStats::observe(double x) {
  if (count_ == 0) {
    min_ = max_ = x;
  } else {
    min_ = std::min(min_, x);
    max_ = std::max(max_, x);
  }
  ++count_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (x - mean_);
}

void StreamingStats::merge(const StreamingStats& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  const double delta = other.mean_ - mean_;
  mean_ += delta * nb / n;
  m2_ += other.m2_ + delta * delta * na * nb / n;
  count_ += other.count_;
  min_ = std::min(min_, other.min_);
  max_ = std::max(max_, other.max_);
}

double StreamingStats::variance() const {
  if (count_ < 2) return std::numeric_limits<double>::quiet_NaN();
  return std::max(0.0, m2_ / static_cast<double>(count_ - 1));
}

Summary StreamingStats::summarize() const {
  Summary s;
  s.count = count_;
  s.mean = mean_;
  if (count_ >= 2) {
    s.variance = variance();
    s.se = std::sqrt(s.variance / static_cast<double>(count_));
  }
  return s;
}

IntDist pool_histograms(std::span<const Histogram> per_replication) {
  Histogram total;
  for (const auto& h : per_replication) {
    if (h.size() > total.size()) total.resize(h.size(), 0);
    for (std::size_t n = 0; n < h.size(); ++n) total[n] += h[n];
  }
  return IntDist::from_counts(total);
}

double jackknife_w1_se(std::span<const Histogram> per_replication, const IntDist& reference) {
  const std::size_t reps = per_replication.size();
  if (reps < 2) throw std::invalid_argument("jackknife_w1_se: need at least two replications");
  Histogram total;
  for (const auto& h : per_replication) {
    if (h.size() > total.size()) total.resize(h.size(), 0);
    for (std::size_t n = 0; n < h.size(); ++n) total[n] += h[n];
  }
  const std::size_t window = std::max(total.size(), reference.size());
  total.resize(window, 0);
  const std::uint64_t grand = std::accumulate(total.begin(), total.end(), std::uint64_t{0});

  std::vector<double> leave_out(reps);
  Histogram reduced(window);
  for (std::size_t r = 0; r < reps; ++r) {
    const auto& h = per_replication[r];
    std::uint64_t removed = 0;
    for (std::size_t n = 0; n < window; ++n) {
      const std::uint64_t c = n < h.size() ? h[n] : 0;
      reduced[n] = total[n] - c;
      removed += c;
    }
    const double denom = static_cast<double>(grand - removed);
    double acc = 0.0;
    double cdf = 0.0;
    for (std::size_t n = 0; n + 1 < window; ++n) {
      cdf += static_cast<double>(reduced[n]) / denom;
      acc += std::abs(cdf - reference.cdf(n));
    }
    leave_out[r] = acc;
  }
  const double mean = std::accumulate(leave_out.begin(), leave_out.end(), 0.0) / static_cast<double>(reps);
  double ss = 0.0;
  for (double v : leave_out) ss += (v - mean) * (v - mean);
  return std::sqrt(ss * static_cast<double>(reps - 1) / static_cast<double>(reps));
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

}  // namespace dollarex

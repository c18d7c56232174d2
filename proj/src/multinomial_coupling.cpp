#include "dollarex/multinomial_coupling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <tuple>

#include "dollarex/metrics.hpp"
#include "dollarex/special.hpp"

namespace dollarex {

Configuration sample_multinomial(int n_agents, int mu, RandomStream& rng) {
  if (n_agents < 1 || mu < 1) throw std::invalid_argument("sample_multinomial: need N, mu >= 1");
  std::vector<int> counts(static_cast<std::size_t>(n_agents), 0);
  const std::int64_t balls = static_cast<std::int64_t>(n_agents) * mu;
  for (std::int64_t b = 0; b < balls; ++b) ++counts[rng.uniform_index(static_cast<std::uint64_t>(n_agents))];
  return Configuration(std::move(counts), mu);
}

namespace {

int poisson_inversion(double mean, RandomStream& rng) {
  const double u = rng.uniform01();
  double p = std::exp(-mean);
  double cdf = p;
  int k = 0;
  // Far-tail guard: once the increments underflow the search cannot move.
  while (u >= cdf && p > 0.0) {
    ++k;
    p *= mean / k;
    cdf += p;
  }
  return k;
}

}  // namespace

int sample_poisson(double mean, RandomStream& rng) {
  if (!(mean > 0.0)) throw std::invalid_argument("sample_poisson: mean must be positive");
  if (mean <= 30.0) return poisson_inversion(mean, rng);
  const int parts = static_cast<int>(std::ceil(mean / 30.0));
  int total = 0;
  for (int i = 0; i < parts; ++i) total += poisson_inversion(mean / parts, rng);
  return total;
}

CoupledOccupancy couple_from_arrivals(std::span<const std::vector<double>> arrival_heights, int mu,
                                      RandomStream& rng) {
  if (arrival_heights.empty() || mu < 1) throw std::invalid_argument("couple_from_arrivals: need N, mu >= 1");
  const auto n_bins = arrival_heights.size();
  const double top = static_cast<double>(mu);
  const std::int64_t target = static_cast<std::int64_t>(n_bins) * mu;

  CoupledOccupancy out;
  out.y.resize(n_bins, 0);
  std::int64_t below = 0;
  for (std::size_t i = 0; i < n_bins; ++i) {
    for (double h : arrival_heights[i]) {
      if (h < 0.0 || h > top) throw std::invalid_argument("couple_from_arrivals: height outside [0, mu]");
    }
    out.y[i] = static_cast<int>(arrival_heights[i].size());
    below += out.y[i];
  }
  out.x = out.y;
  out.bar_height = top;

  if (below < target) {
    // Memorylessness: above mu the next completion is Exp(N) higher, in a
    // uniformly chosen bin.
    double height = top;
    for (std::int64_t added = below; added < target; ++added) {
      height += rng.exponential(static_cast<double>(n_bins));
      ++out.x[rng.uniform_index(n_bins)];
    }
    out.bar_height = height;
  } else if (below > target) {
    std::vector<std::pair<double, std::size_t>> all;
    all.reserve(static_cast<std::size_t>(below));
    for (std::size_t i = 0; i < n_bins; ++i)
      for (double h : arrival_heights[i]) all.emplace_back(h, i);
    std::sort(all.begin(), all.end(), [](const auto& l, const auto& r) {
      return std::tie(l.first, l.second) > std::tie(r.first, r.second);
    });
    const auto excess = static_cast<std::size_t>(below - target);
    for (std::size_t j = 0; j < excess; ++j) --out.x[all[j].second];
    out.bar_height = all[excess].first;
  }
  return out;
}

CoupledOccupancy sample_coupled(int n_agents, int mu, RandomStream& rng) {
  if (n_agents < 1 || mu < 1) throw std::invalid_argument("sample_coupled: need N, mu >= 1");
  const double top = static_cast<double>(mu);
  std::vector<std::vector<double>> arrivals(static_cast<std::size_t>(n_agents));
  for (auto& bin : arrivals) {
    for (double h = rng.exponential(1.0); h <= top; h += rng.exponential(1.0)) bin.push_back(h);
  }
  return couple_from_arrivals(arrivals, mu, rng);
}

double exact_mean_deviation_poisson(std::uint64_t m) {
  if (m < 1) throw std::invalid_argument("exact_mean_deviation_poisson: m must be >= 1");
  const double x = static_cast<double>(m);
  return std::exp(std::log(2.0) - x + (x + 1.0) * std::log(x) - log_factorial(m));
}

double multinomial_poisson_closed_bound(int n_agents, int mu) {
  if (n_agents < 1 || mu < 1) throw std::invalid_argument("multinomial_poisson_closed_bound: need N, mu >= 1");
  return std::sqrt(2.0 * mu / M_PI) / std::sqrt(static_cast<double>(n_agents));
}

double exact_coupling_cost(int n_agents, int mu) {
  const auto m = static_cast<std::uint64_t>(n_agents) * static_cast<std::uint64_t>(mu);
  return exact_mean_deviation_poisson(m) / static_cast<double>(n_agents);
}

double w1_multinomial_poisson_bound(int n_agents, int mu) {
  if (n_agents < 2) throw std::invalid_argument("w1_multinomial_poisson_bound: N must be >= 2");
  return std::min(exact_coupling_cost(n_agents, mu), multinomial_poisson_closed_bound(n_agents, mu));
}

double coupling_cost(const CoupledOccupancy& sample) {
  std::int64_t total = 0;
  for (std::size_t i = 0; i < sample.x.size(); ++i) total += std::abs(sample.x[i] - sample.y[i]);
  return static_cast<double>(total) / static_cast<double>(sample.x.size());
}

CostEstimate empirical_coupling_cost(int n_agents, int mu, int reps, RandomStream& rng) {
  if (reps < 2) throw std::invalid_argument("empirical_coupling_cost: reps must be >= 2");
  StreamingStats stats;
  for (int r = 0; r < reps; ++r) stats.observe(coupling_cost(sample_coupled(n_agents, mu, rng)));
  const Summary s = stats.summarize();
  return CostEstimate{s.mean, *s.se};
}

}  // namespace dollarex

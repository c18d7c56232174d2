#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dollarex/model.hpp"
#include "dollarex/random.hpp"

namespace dollarex {

// Multinomial occupancy x and i.i.d. Poisson(mu) occupancy y built from the
// same N unit-rate arrival processes. sum(x) == N*mu, and x_i - y_i has one
// sign across all bins.
struct CoupledOccupancy {
  std::vector<int> x;
  std::vector<int> y;
  double bar_height = 0.0;  // a height where exactly N*mu arrivals lie below
};

// N*mu balls tossed uniformly into N bins.
Configuration sample_multinomial(int n_agents, int mu, RandomStream& rng);

// Poisson(mean) by sequential-search inversion; means above 30 are split into
// equal parts that are summed.
int sample_poisson(double mean, RandomStream& rng);

CoupledOccupancy sample_coupled(int n_agents, int mu, RandomStream& rng);

// Completes the bar from given per-bin arrival heights (each within [0, mu]):
// y counts the arrivals, then the bar is raised above mu with fresh
// memoryless arrivals or lowered by dropping the highest arrivals (ties by
// bin index) until exactly N*mu lie below.
CoupledOccupancy couple_from_arrivals(std::span<const std::vector<double>> arrival_heights, int mu,
                                      RandomStream& rng);

// E|Z - m| for Z ~ Poisson(m): 2 e^{-m} m^{m+1} / m!, evaluated in log space.
double exact_mean_deviation_poisson(std::uint64_t m);

// sqrt(2 mu / pi) / sqrt(N).
double multinomial_poisson_closed_bound(int n_agents, int mu);

// min(exact coupling cost, closed bound). Requires N >= 2.
double w1_multinomial_poisson_bound(int n_agents, int mu);

// Exact coupling cost (1/N) E|N*mu - Z|.
double exact_coupling_cost(int n_agents, int mu);

// (1/N) sum |x_i - y_i| of one coupled sample.
double coupling_cost(const CoupledOccupancy& sample);

struct CostEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

// Monte Carlo mean of the coupling cost over `reps` (>= 2) samples.
CostEstimate empirical_coupling_cost(int n_agents, int mu, int reps, RandomStream& rng);

}  // namespace dollarex

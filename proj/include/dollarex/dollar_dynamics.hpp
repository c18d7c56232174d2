#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dollarex/model.hpp"
#include "dollarex/random.hpp"

namespace dollarex {

// Dollar-wise state: labels[k] is the (0-based) agent holding dollar k.
// Length is always n_agents * mu.
class DollarConfig {
 public:
  DollarConfig(std::vector<int> labels, int n_agents, int mu);

  // Dollars of agent 0 first, then agent 1, and so on.
  static DollarConfig from_agent_config(const Configuration& config);

  int n_agents() const { return n_agents_; }
  int mu() const { return mu_; }
  std::size_t n_dollars() const { return labels_.size(); }
  const std::vector<int>& labels() const { return labels_; }
  int operator[](std::size_t k) const { return labels_[k]; }
  void relabel(std::size_t k, int agent) { labels_[k] = agent; }

  friend bool operator==(const DollarConfig&, const DollarConfig&) = default;

 private:
  std::vector<int> labels_;
  int n_agents_;
  int mu_;
};

// Occupancy counts Q_i = #{k : labels[k] == i}.
Configuration to_agent_config(const DollarConfig& d);

// Number of dollars whose holders differ. Throws on shape mismatch.
std::int64_t rho(const DollarConfig& a, const DollarConfig& b);

// (1/N) * sum_i |S_i - R_i|. Throws on shape mismatch.
double d_agent(const Configuration& s, const Configuration& r);

// Global clock of rate M*N/(N-1); each ring relabels a uniform dollar to a
// uniform agent (a self-pick leaves it in place). N == 1 returns the input.
DollarConfig simulate_dollarwise(DollarConfig d, double t_end, RandomStream& rng);

// Two dollar-wise chains driven by one event stream. Once dollar k has been
// picked, both chains hold it at the same agent.
struct CoupledPair {
  CoupledPair(DollarConfig a, DollarConfig b);

  DollarConfig chain_a;
  DollarConfig chain_b;
  double clock = 0.0;
  std::vector<bool> touched;
  std::int64_t mismatches = 0;  // rho(chain_a, chain_b), maintained incrementally
};

struct CoupledEvent {
  double time = 0.0;
  std::size_t dollar = 0;
  int agent = 0;
};

// Advances the pair to `t_end` (absolute clock). `on_event`, if given, runs
// after every applied event.
void simulate_coupled(CoupledPair& pair, double t_end, RandomStream& rng,
                      const std::function<void(const CoupledPair&, const CoupledEvent&)>& on_event = {});

// d_agent between the occupancy vectors of both chains; never exceeds
// (2/N) * rho of the pair.
double coupled_agent_distance(const CoupledPair& pair);

// Sum of |Q^a_i - Q^b_i| over the first k agents, divided by k.
double coupled_prefix_distance(const CoupledPair& pair, int k);

// First pick time of every dollar in one dollar-wise run of N agents and
// mu dollars each (the run lasts until all dollars are picked).
std::vector<double> sample_first_pick_times(int n_agents, int mu, RandomStream& rng);

}  // namespace dollarex

#include "dollarex/dollar_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace dollarex {

DollarConfig::DollarConfig(std::vector<int> labels, int n_agents, int mu)
    : labels_(std::move(labels)), n_agents_(n_agents), mu_(mu) {
  if (n_agents_ < 1 || mu_ < 1) throw std::invalid_argument("DollarConfig: N and mu must be >= 1");
  if (labels_.size() != static_cast<std::size_t>(n_agents_) * static_cast<std::size_t>(mu_))
    throw std::invalid_argument("DollarConfig: need exactly N*mu labels");
  for (int a : labels_)
    if (a < 0 || a >= n_agents_) throw std::invalid_argument("DollarConfig: label out of range");
}

DollarConfig DollarConfig::from_agent_config(const Configuration& config) {
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(config.total()));
  for (int i = 0; i < config.n_agents(); ++i)
    for (int c = 0; c < config[static_cast<std::size_t>(i)]; ++c) labels.push_back(i);
  return DollarConfig(std::move(labels), config.n_agents(), config.mu());
}

Configuration to_agent_config(const DollarConfig& d) {
  std::vector<int> counts(static_cast<std::size_t>(d.n_agents()), 0);
  for (int a : d.labels()) ++counts[static_cast<std::size_t>(a)];
  return Configuration(std::move(counts), d.mu());
}

std::int64_t rho(const DollarConfig& a, const DollarConfig& b) {
  if (a.n_agents() != b.n_agents() || a.mu() != b.mu())
    throw std::invalid_argument("rho: configurations have different shapes");
  std::int64_t count = 0;
  for (std::size_t k = 0; k < a.n_dollars(); ++k) count += a[k] != b[k];
  return count;
}

double d_agent(const Configuration& s, const Configuration& r) {
  if (s.n_agents() != r.n_agents() || s.mu() != r.mu())
    throw std::invalid_argument("d_agent: configurations have different shapes");
  std::int64_t total = 0;
  for (std::size_t i = 0; i < static_cast<std::size_t>(s.n_agents()); ++i) total += std::abs(s[i] - r[i]);
  return static_cast<double>(total) / static_cast<double>(s.n_agents());
}

namespace {

double global_rate(int n_agents, std::size_t n_dollars) {
  return static_cast<double>(n_dollars) * static_cast<double>(n_agents) / static_cast<double>(n_agents - 1);
}

}  // namespace

DollarConfig simulate_dollarwise(DollarConfig d, double t_end, RandomStream& rng) {
  if (!(t_end >= 0.0)) throw std::invalid_argument("simulate_dollarwise: t_end must be >= 0");
  if (d.n_agents() < 2) return d;
  const double rate = global_rate(d.n_agents(), d.n_dollars());
  const auto m = static_cast<std::uint64_t>(d.n_dollars());
  const auto n = static_cast<std::uint64_t>(d.n_agents());
  for (double clock = rng.exponential(rate); clock <= t_end; clock += rng.exponential(rate)) {
    const auto k = rng.uniform_index(m);
    d.relabel(k, static_cast<int>(rng.uniform_index(n)));
  }
  return d;
}

CoupledPair::CoupledPair(DollarConfig a, DollarConfig b)
    : chain_a(std::move(a)), chain_b(std::move(b)), touched(chain_a.n_dollars(), false) {
  mismatches = rho(chain_a, chain_b);
}

void simulate_coupled(CoupledPair& pair, double t_end, RandomStream& rng,
                      const std::function<void(const CoupledPair&, const CoupledEvent&)>& on_event) {
  const int n_agents = pair.chain_a.n_agents();
  if (n_agents < 2 || t_end <= pair.clock) {
    pair.clock = std::max(pair.clock, t_end);
    return;
  }
  const double rate = global_rate(n_agents, pair.chain_a.n_dollars());
  const auto m = static_cast<std::uint64_t>(pair.chain_a.n_dollars());
  const auto n = static_cast<std::uint64_t>(n_agents);
  for (;;) {
    const double next = pair.clock + rng.exponential(rate);
    if (next > t_end) break;
    pair.clock = next;
    const auto k = static_cast<std::size_t>(rng.uniform_index(m));
    const int agent = static_cast<int>(rng.uniform_index(n));
    if (pair.chain_a[k] != pair.chain_b[k]) --pair.mismatches;
    pair.chain_a.relabel(k, agent);
    pair.chain_b.relabel(k, agent);
    pair.touched[k] = true;
    if (on_event) on_event(pair, CoupledEvent{next, k, agent});
  }
  // The gap after the last event carries no ring, so the clock simply advances.
  pair.clock = t_end;
}

double coupled_agent_distance(const CoupledPair& pair) {
  return d_agent(to_agent_config(pair.chain_a), to_agent_config(pair.chain_b));
}

double coupled_prefix_distance(const CoupledPair& pair, int k) {
  if (k < 1 || k > pair.chain_a.n_agents()) throw std::invalid_argument("coupled_prefix_distance: bad k");
  std::vector<int> diff(static_cast<std::size_t>(k), 0);
  for (std::size_t j = 0; j < pair.chain_a.n_dollars(); ++j) {
    if (pair.chain_a[j] < k) ++diff[static_cast<std::size_t>(pair.chain_a[j])];
    if (pair.chain_b[j] < k) --diff[static_cast<std::size_t>(pair.chain_b[j])];
  }
  std::int64_t total = 0;
  for (int v : diff) total += std::abs(v);
  return static_cast<double>(total) / static_cast<double>(k);
}

std::vector<double> sample_first_pick_times(int n_agents, int mu, RandomStream& rng) {
  if (n_agents < 2 || mu < 1) throw std::invalid_argument("sample_first_pick_times: need N >= 2, mu >= 1");
  const auto m = static_cast<std::size_t>(n_agents) * static_cast<std::size_t>(mu);
  const double rate = global_rate(n_agents, m);
  std::vector<double> first(m, -1.0);
  std::size_t remaining = m;
  double clock = 0.0;
  while (remaining > 0) {
    clock += rng.exponential(rate);
    const auto k = static_cast<std::size_t>(rng.uniform_index(m));
    // The target agent is irrelevant for pick times but is drawn to keep the
    // stream aligned with simulate_dollarwise.
    rng.uniform_index(static_cast<std::uint64_t>(n_agents));
    if (first[k] < 0.0) {
      first[k] = clock;
      --remaining;
    }
  }
  return first;
}

}  // namespace dollarex

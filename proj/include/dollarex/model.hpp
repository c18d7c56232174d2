#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "dollarex/int_dist.hpp"
#include "dollarex/random.hpp"

namespace dollarex {

// Wealth vector of a closed N-agent economy with mu dollars per agent on
// average. Agents are indexed from 0. The constructor enforces
// sum(wealth) == n_agents * mu, nonnegative entries, and N, mu >= 1.
class Configuration {
 public:
  Configuration(std::vector<int> wealth, int mu);

  int n_agents() const { return static_cast<int>(wealth_.size()); }
  int mu() const { return mu_; }
  std::int64_t total() const { return static_cast<std::int64_t>(wealth_.size()) * mu_; }

  std::span<const int> wealth() const { return wealth_; }
  int operator[](std::size_t i) const { return wealth_[i]; }

  // Moves one dollar; giver must hold at least one.
  void transfer(int giver, int receiver);

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::vector<int> wealth_;
  int mu_;
};

enum class ExchangeRule { PoorBiased, Unbiased, RichBiased };

struct ModelKind {
  ExchangeRule rule = ExchangeRule::PoorBiased;
  double lambda = 1.0;
};

ModelKind make_model(ExchangeRule rule, double lambda = 1.0);
ExchangeRule parse_rule(std::string_view name);
std::string_view rule_name(ExchangeRule rule);

struct JumpEvent {
  double time = 0.0;
  int giver = -1;
  int receiver = -1;
  bool no_op = false;
};

struct EqualInit {};
struct AllToOneInit {};
struct FromVectorInit {
  std::vector<int> wealth;
};
// i.i.d. draws from `law`, then one-dollar sum repairs at uniformly random agents.
struct IidInit {
  IntDist law;
};
using InitKind = std::variant<EqualInit, AllToOneInit, FromVectorInit, IidInit>;

// Throws std::invalid_argument for N == 0, mu == 0, a length or sum mismatch
// in FromVectorInit, or IidInit without a random stream.
Configuration new_configuration(int n_agents, int mu, const InitKind& init);
Configuration new_configuration(int n_agents, int mu, const InitKind& init, RandomStream& rng);

// Per-giver selection weight: S_i, 1{S_i >= 1} or 1{S_i >= 1}/S_i.
double giver_weight(ExchangeRule rule, int wealth);

// Sum over agents of lambda * weight * N/(N-1), i.e. the rate of clock rings
// including self-picks. Zero for N == 1.
double total_event_rate(const Configuration& config, const ModelKind& kind);

// One Gillespie event starting at `clock`. Giver drawn proportional to
// giver_weight, receiver uniform over all N agents; a self-pick is a no-op.
// Throws std::logic_error if the total rate is zero.
JumpEvent step(Configuration& config, const ModelKind& kind, RandomStream& rng, double clock = 0.0);

// Observer called at each sample time with the state at that time.
struct SampleSchedule {
  std::vector<double> times;  // nondecreasing, within [0, t_end]
  std::function<void(std::size_t index, double time, const Configuration&)> callback;
};

struct SimulationResult {
  Configuration state;
  std::uint64_t events = 0;     // clock rings, including no-ops
  std::uint64_t transfers = 0;  // events that moved a dollar
};

SimulationResult simulate(Configuration config, const ModelKind& kind, double t_end, RandomStream& rng,
                          const SampleSchedule* schedule = nullptr);

// Pooled empirical pmf of the selected agents' wealth across configs. An
// empty `agents` selects every agent. Throws on empty input.
IntDist empirical_marginal(std::span<const Configuration> configs, std::span<const int> agents = {});

// Adds the selected agents' wealth values into `counts`, growing it as needed.
void accumulate_wealth(const Configuration& config, std::vector<std::uint64_t>& counts,
                       std::span<const int> agents = {});

}  // namespace dollarex

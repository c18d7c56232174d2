#include "dollarex/model.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dollarex {

Configuration::Configuration(std::vector<int> wealth, int mu) : wealth_(std::move(wealth)), mu_(mu) {
  if (wealth_.empty()) throw std::invalid_argument("Configuration: need at least one agent");
  if (mu_ < 1) throw std::invalid_argument("Configuration: mu must be >= 1");
  std::int64_t sum = 0;
  for (int w : wealth_) {
    if (w < 0) throw std::invalid_argument("Configuration: negative wealth");
    sum += w;
  }
  if (sum != total())
    throw std::invalid_argument("Configuration: wealth sums to " + std::to_string(sum) + ", expected " +
                                std::to_string(total()));
}

void Configuration::transfer(int giver, int receiver) {
  if (wealth_[giver] < 1) throw std::logic_error("Configuration::transfer: giver has no dollars");
  --wealth_[giver];
  ++wealth_[receiver];
}

ModelKind make_model(ExchangeRule rule, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("ModelKind: lambda must be positive");
  return ModelKind{rule, lambda};
}

ExchangeRule parse_rule(std::string_view name) {
  if (name == "poor") return ExchangeRule::PoorBiased;
  if (name == "unbiased") return ExchangeRule::Unbiased;
  if (name == "rich") return ExchangeRule::RichBiased;
  throw std::invalid_argument("unknown model '" + std::string(name) + "' (expected poor|unbiased|rich)");
}

std::string_view rule_name(ExchangeRule rule) {
  switch (rule) {
    case ExchangeRule::PoorBiased: return "poor";
    case ExchangeRule::Unbiased: return "unbiased";
    case ExchangeRule::RichBiased: return "rich";
  }
  return "?";
}

namespace {

void repair_sum(std::vector<int>& wealth, std::int64_t target, RandomStream& rng) {
  std::int64_t sum = std::accumulate(wealth.begin(), wealth.end(), std::int64_t{0});
  const auto n = static_cast<std::uint64_t>(wealth.size());
  while (sum < target) {
    ++wealth[rng.uniform_index(n)];
    ++sum;
  }
  while (sum > target) {
    const auto i = rng.uniform_index(n);
    if (wealth[i] > 0) {
      --wealth[i];
      --sum;
    }
  }
}

int sample_from(const IntDist& law, RandomStream& rng) {
  const double u = rng.uniform01() * law.mass();
  for (std::size_t n = 0; n < law.size(); ++n)
    if (u < law.cdf(n)) return static_cast<int>(n);
  return static_cast<int>(law.n_max());
}

}  // namespace

Configuration new_configuration(int n_agents, int mu, const InitKind& init) {
  if (std::holds_alternative<IidInit>(init))
    throw std::invalid_argument("new_configuration: i.i.d. initialization needs a random stream");
  RandomStream unused(0);
  return new_configuration(n_agents, mu, init, unused);
}

Configuration new_configuration(int n_agents, int mu, const InitKind& init, RandomStream& rng) {
  if (n_agents < 1) throw std::invalid_argument("new_configuration: n_agents must be >= 1");
  if (mu < 1) throw std::invalid_argument("new_configuration: mu must be >= 1");
  const auto n = static_cast<std::size_t>(n_agents);
  return std::visit(
      [&](const auto& kind) -> Configuration {
        using T = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<T, EqualInit>) {
          return Configuration(std::vector<int>(n, mu), mu);
        } else if constexpr (std::is_same_v<T, AllToOneInit>) {
          std::vector<int> w(n, 0);
          w[0] = n_agents * mu;
          return Configuration(std::move(w), mu);
        } else if constexpr (std::is_same_v<T, FromVectorInit>) {
          if (kind.wealth.size() != n)
            throw std::invalid_argument("new_configuration: vector length differs from n_agents");
          return Configuration(kind.wealth, mu);
        } else {
          std::vector<int> w(n);
          for (auto& x : w) x = sample_from(kind.law, rng);
          repair_sum(w, static_cast<std::int64_t>(n_agents) * mu, rng);
          return Configuration(std::move(w), mu);
        }
      },
      init);
}

double giver_weight(ExchangeRule rule, int wealth) {
  if (wealth < 1) return 0.0;
  switch (rule) {
    case ExchangeRule::PoorBiased: return static_cast<double>(wealth);
    case ExchangeRule::Unbiased: return 1.0;
    case ExchangeRule::RichBiased: return 1.0 / static_cast<double>(wealth);
  }
  return 0.0;
}

namespace {

double self_pick_inflation(int n_agents) {
  return static_cast<double>(n_agents) / static_cast<double>(n_agents - 1);
}

// Fenwick tree over giver weights for the rules whose weights change with
// every transfer.
class WeightTree {
 public:
  explicit WeightTree(std::size_t n) : tree_(n + 1, 0.0), values_(n, 0.0) {
    top_bit_ = 1;
    while (top_bit_ * 2 <= n) top_bit_ *= 2;
  }

  void set(std::size_t i, double value) {
    const double delta = value - values_[i];
    values_[i] = value;
    for (std::size_t k = i + 1; k < tree_.size(); k += k & (~k + 1)) tree_[k] += delta;
  }

  double total() const {
    double s = 0.0;
    for (std::size_t k = tree_.size() - 1; k > 0; k -= k & (~k + 1)) s += tree_[k];
    return s;
  }

  // Smallest index whose inclusive prefix sum exceeds `target`, skipping
  // zero-weight slots that rounding might land on.
  std::size_t find(double target) const {
    std::size_t pos = 0;
    for (std::size_t step = top_bit_; step > 0; step /= 2) {
      const std::size_t next = pos + step;
      if (next < tree_.size() && tree_[next] <= target) {
        pos = next;
        target -= tree_[next];
      }
    }
    std::size_t i = std::min(pos, values_.size() - 1);
    while (values_[i] == 0.0) {
      if (i + 1 < values_.size()) {
        ++i;
      } else {
        while (values_[i] == 0.0) --i;
      }
    }
    return i;
  }

 private:
  std::vector<double> tree_;
  std::vector<double> values_;
  std::size_t top_bit_;
};

}  // namespace

double total_event_rate(const Configuration& config, const ModelKind& kind) {
  const int n = config.n_agents();
  if (n < 2) return 0.0;
  double weight = 0.0;
  if (kind.rule == ExchangeRule::PoorBiased) {
    weight = static_cast<double>(config.total());
  } else {
    for (int w : config.wealth()) weight += giver_weight(kind.rule, w);
  }
  return kind.lambda * weight * self_pick_inflation(n);
}

JumpEvent step(Configuration& config, const ModelKind& kind, RandomStream& rng, double clock) {
  const double rate = total_event_rate(config, kind);
  if (!(rate > 0.0)) throw std::logic_error("step: total event rate is zero");
  JumpEvent ev;
  ev.time = clock + rng.exponential(rate);

  const auto wealth = config.wealth();
  double total_weight = 0.0;
  for (int w : wealth) total_weight += giver_weight(kind.rule, w);
  const double u = rng.uniform01() * total_weight;
  double acc = 0.0;
  int giver = -1;
  for (std::size_t i = 0; i < wealth.size(); ++i) {
    const double w = giver_weight(kind.rule, wealth[i]);
    if (w == 0.0) continue;
    giver = static_cast<int>(i);
    acc += w;
    if (u < acc) break;
  }
  ev.giver = giver;
  ev.receiver = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(config.n_agents())));
  ev.no_op = ev.receiver == ev.giver;
  if (!ev.no_op) config.transfer(ev.giver, ev.receiver);
  return ev;
}

namespace {

// Fires every scheduled sample strictly before `until` (or all remaining,
// when `until` is infinite) using the current state.
void fire_samples(const SampleSchedule* schedule, std::size_t& next, double until, const Configuration& state) {
  if (schedule == nullptr) return;
  while (next < schedule->times.size() && schedule->times[next] < until) {
    if (schedule->callback) schedule->callback(next, schedule->times[next], state);
    ++next;
  }
}

}  // namespace

SimulationResult simulate(Configuration config, const ModelKind& kind, double t_end, RandomStream& rng,
                          const SampleSchedule* schedule) {
  if (!(t_end >= 0.0)) throw std::invalid_argument("simulate: t_end must be >= 0");
  SimulationResult result{std::move(config), 0, 0};
  Configuration& state = result.state;
  std::size_t next_sample = 0;
  const int n = state.n_agents();
  const double inf = std::numeric_limits<double>::infinity();

  if (n < 2 || t_end == 0.0) {
    fire_samples(schedule, next_sample, inf, state);
    return result;
  }

  double clock = 0.0;
  const auto n_u = static_cast<std::uint64_t>(n);

  if (kind.rule == ExchangeRule::PoorBiased) {
    // A giver drawn proportional to wealth is the holder of a uniformly
    // random dollar, so keep the dollar-to-agent labels alongside the counts.
    std::vector<int> labels;
    labels.reserve(static_cast<std::size_t>(state.total()));
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < state[i]; ++c) labels.push_back(i);
    const double rate = total_event_rate(state, kind);
    const auto m = static_cast<std::uint64_t>(labels.size());
    for (;;) {
      const double next_time = clock + rng.exponential(rate);
      if (next_time > t_end) break;
      fire_samples(schedule, next_sample, next_time, state);
      clock = next_time;
      ++result.events;
      const auto k = rng.uniform_index(m);
      const int receiver = static_cast<int>(rng.uniform_index(n_u));
      const int giver = labels[k];
      if (receiver != giver) {
        state.transfer(giver, receiver);
        labels[k] = receiver;
        ++result.transfers;
      }
    }
  } else {
    WeightTree tree(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) tree.set(static_cast<std::size_t>(i), giver_weight(kind.rule, state[i]));
    const double scale = kind.lambda * self_pick_inflation(n);
    std::uint64_t since_refresh = 0;
    double total_weight = tree.total();
    for (;;) {
      const double next_time = clock + rng.exponential(scale * total_weight);
      if (next_time > t_end) break;
      fire_samples(schedule, next_sample, next_time, state);
      clock = next_time;
      ++result.events;
      const int giver = static_cast<int>(tree.find(rng.uniform01() * total_weight));
      const int receiver = static_cast<int>(rng.uniform_index(n_u));
      if (receiver == giver) continue;
      const double before = giver_weight(kind.rule, state[giver]) + giver_weight(kind.rule, state[receiver]);
      state.transfer(giver, receiver);
      const double wg = giver_weight(kind.rule, state[giver]);
      const double wr = giver_weight(kind.rule, state[receiver]);
      tree.set(static_cast<std::size_t>(giver), wg);
      tree.set(static_cast<std::size_t>(receiver), wr);
      ++result.transfers;
      if (++since_refresh == 4096) {
        total_weight = tree.total();
        since_refresh = 0;
      } else {
        total_weight += wg + wr - before;
      }
    }
  }
  // Remaining sample times lie in [clock, t_end], where the state is constant.
  fire_samples(schedule, next_sample, inf, state);
  return result;
}

void accumulate_wealth(const Configuration& config, std::vector<std::uint64_t>& counts,
                       std::span<const int> agents) {
  auto add = [&](int w) {
    const auto idx = static_cast<std::size_t>(w);
    if (idx >= counts.size()) counts.resize(idx + 1, 0);
    ++counts[idx];
  };
  if (agents.empty()) {
    for (int w : config.wealth()) add(w);
  } else {
    for (int i : agents) {
      if (i < 0 || i >= config.n_agents()) throw std::out_of_range("accumulate_wealth: agent index");
      add(config[static_cast<std::size_t>(i)]);
    }
  }
}

IntDist empirical_marginal(std::span<const Configuration> configs, std::span<const int> agents) {
  if (configs.empty()) throw std::invalid_argument("empirical_marginal: no configurations");
  std::vector<std::uint64_t> counts;
  for (const auto& c : configs) accumulate_wealth(c, counts, agents);
  return IntDist::from_counts(counts);
}

}  // namespace dollarex

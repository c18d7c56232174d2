#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dollarex/model.hpp"
#include "dollarex/report.hpp"

namespace dollarex {

enum class InitChoice { Equal, AllToOne, Iid };
InitChoice parse_init(const std::string& name);
std::string init_name(InitChoice choice);

// Inclusive arithmetic grid a, a + step, ..., b (parsed from "a:b:step").
std::vector<double> parse_time_grid(const std::string& text);

struct ExperimentConfig {
  std::vector<int> agents;  // poc sweeps all values; other commands use agents[0]
  int mu = 0;
  ExchangeRule rule = ExchangeRule::PoorBiased;
  double lambda = 1.0;
  double t_end = 0.0;
  std::vector<double> t_grid;
  std::string t_grid_text;
  int reps = 1;
  std::uint64_t seed = 0;
  std::optional<std::size_t> n_max;
  std::optional<double> dt;
  std::optional<double> sample_interval;  // ode snapshot spacing
  InitChoice init_a = InitChoice::Equal;  // simulate init, or chain a
  InitChoice init_b = InitChoice::Equal;  // chain b
  std::string p0 = "delta";               // ode initial law
  int k = 1;                              // poc marginal size
  int workers = 1;                        // excluded from reports
};

// Parameters that are part of the reproducible output.
nlohmann::ordered_json echo_config(const std::string& command, const ExperimentConfig& config);

// Throw std::invalid_argument on bad parameters.
ExperimentReport cmd_simulate(const ExperimentConfig& config);
ExperimentReport cmd_couple_chains(const ExperimentConfig& config);
ExperimentReport cmd_couple_multinomial(const ExperimentConfig& config);
ExperimentReport cmd_ode(const ExperimentConfig& config);
ExperimentReport cmd_poc(const ExperimentConfig& config);

// Initial law for `ode`: "delta" (point mass at mu), "equilibrium", or
// "two-point:a:b" (mixture of point masses at a <= mu <= b with mean mu).
IntDist parse_initial_law(const std::string& text, double mu);

// Exit statuses of the command-line tool.
inline constexpr int kExitPass = 0;
inline constexpr int kExitBoundViolation = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

int parse_and_dispatch(int argc, const char* const* argv);

}  // namespace dollarex

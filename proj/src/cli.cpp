#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "dollarex/experiments.hpp"
#include "dollarex/parallel.hpp"

namespace dollarex {

namespace {

struct RawOptions {
  std::vector<int> agents;
  int mu = 0;
  std::string model = "poor";
  std::optional<double> t_end;
  std::optional<std::string> t_grid;
  std::optional<int> reps;
  std::uint64_t seed = 0;
  std::optional<std::size_t> n_max;
  std::optional<double> dt;
  std::optional<double> sample_every;
  std::string out;
  std::string format = "csv";
  int workers = 0;
  std::string init = "equal";
  std::string init_a = "all-to-one";
  std::string init_b = "equal";
  std::string p0 = "delta";
  int k = 1;
  double lambda = 1.0;
};

struct CommandInfo {
  const char* name;
  const char* help;
  bool needs_agents;
  double default_t_end;
  const char* default_grid;
  int default_reps;
};

const CommandInfo kCommands[] = {
    {"simulate", "N-agent exchange dynamics; pooled wealth marginal vs Poisson(mu) and Binomial(mu N, 1/N)", true,
     20.0, nullptr, 50},
    {"couple-chains", "synchronous dollar-wise coupling of two chains vs the 2 mu e^{-t} envelope", true, 0.0,
     "0:8:1", 10000},
    {"couple-multinomial", "bar-raising multinomial/Poisson coupling cost vs sqrt(2 mu/pi)/sqrt(N)", true, 0.0,
     nullptr, 10000},
    {"ode", "mean-field ODE decay, Bakry-Emery identity and W1 envelope", false, 10.0, nullptr, 1},
    {"poc", "uniform-in-time propagation of chaos over an N sweep", false, 0.0, "0:10:0.5", 2000},
};

ExperimentConfig to_config(const CommandInfo& info, const RawOptions& raw) {
  ExperimentConfig c;
  c.agents = raw.agents;
  c.mu = raw.mu;
  c.rule = parse_rule(raw.model);
  c.lambda = raw.lambda;
  c.t_end = raw.t_end.value_or(info.default_t_end);
  if (raw.t_grid || info.default_grid) {
    c.t_grid_text = raw.t_grid.value_or(info.default_grid ? info.default_grid : "");
    c.t_grid = parse_time_grid(c.t_grid_text);
  }
  c.reps = raw.reps.value_or(info.default_reps);
  c.seed = raw.seed;
  c.n_max = raw.n_max;
  c.dt = raw.dt;
  c.sample_interval = raw.sample_every;
  const std::string name = info.name;
  if (name == "couple-chains") {
    c.init_a = parse_init(raw.init_a);
    c.init_b = parse_init(raw.init_b);
  } else {
    c.init_a = parse_init(raw.init);
  }
  c.p0 = raw.p0;
  c.k = raw.k;
  c.workers = resolve_workers(raw.workers);
  return c;
}

ExperimentReport run_command(const std::string& name, const ExperimentConfig& c) {
  if (name == "simulate") return cmd_simulate(c);
  if (name == "couple-chains") return cmd_couple_chains(c);
  if (name == "couple-multinomial") return cmd_couple_multinomial(c);
  if (name == "ode") return cmd_ode(c);
  return cmd_poc(c);
}

void print_summary(const ExperimentReport& report, double seconds) {
  std::cerr << report.command << ": " << (report.passed ? "PASS" : "BOUND VIOLATION") << " (" << report.rows.size()
            << " rows, " << format_double(seconds) << " s)\n";
  for (const auto& [key, value] : report.summary.items()) {
    if (key == "marginal") continue;
    std::cerr << "  " << key << " = " << value.dump() << '\n';
  }
}

}  // namespace

int parse_and_dispatch(int argc, const char* const* argv) {
  CLI::App app{"Laboratory for the poor-biased dollar exchange model and its mean-field limit.", "dollarex"};
  app.require_subcommand(1);
  RawOptions raw;
  std::map<std::string, CLI::App*> subs;

  for (const auto& info : kCommands) {
    CLI::App* sub = app.add_subcommand(info.name, info.help);
    auto* agents = sub->add_option("--agents", raw.agents, "number of agents N (poc: comma-separated sweep)")
                       ->delimiter(',');
    if (info.needs_agents) agents->required();
    sub->add_option("--mu", raw.mu, "average dollars per agent")->required();
    sub->add_option("--model", raw.model, "exchange rule")->check(CLI::IsMember({"poor", "unbiased", "rich"}));
    sub->add_option("--lambda", raw.lambda, "rate scale");
    sub->add_option("--t-end", raw.t_end, "final time");
    sub->add_option("--t-grid", raw.t_grid, "time grid a:b:step");
    sub->add_option("--reps", raw.reps, "independent replications");
    sub->add_option("--seed", raw.seed, "master seed (default 0)");
    sub->add_option("--nmax", raw.n_max, "mean-field truncation index");
    sub->add_option("--dt", raw.dt, "ODE time step");
    sub->add_option("--sample-every", raw.sample_every, "ODE snapshot spacing (default: every step)");
    sub->add_option("--out", raw.out, "output path (default: stdout)");
    sub->add_option("--format", raw.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--workers", raw.workers, "worker threads (default: all cores)");
    sub->add_option("--init", raw.init, "initial configuration: equal|all-to-one|iid");
    sub->add_option("--init-a", raw.init_a, "couple-chains: first chain start (default all-to-one)");
    sub->add_option("--init-b", raw.init_b, "couple-chains: second chain start (default equal)");
    sub->add_option("--p0", raw.p0, "ode: initial law delta|equilibrium|two-point:a:b");
    sub->add_option("--k", raw.k, "poc: number of tagged agents");
    subs[info.name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  const CommandInfo* info = nullptr;
  for (const auto& s : kCommands)
    if (subs[s.name]->parsed()) info = &s;

  ExperimentReport report;
  const auto started = std::chrono::steady_clock::now();
  try {
    report = run_command(info->name, to_config(*info, raw));
  } catch (const std::exception& e) {
    std::cerr << "dollarex " << info->name << ": " << e.what() << '\n';
    return kExitUsage;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  auto emit = [&](std::ostream& os) {
    if (raw.format == "json") {
      write_json(report, os);
    } else {
      write_csv(report, os);
    }
  };
  if (raw.out.empty()) {
    emit(std::cout);
    if (!std::cout) return kExitIo;
  } else {
    std::ofstream file(raw.out, std::ios::binary);
    if (!file) {
      std::cerr << "dollarex: cannot open '" << raw.out << "' for writing\n";
      return kExitIo;
    }
    emit(file);
    file.close();
    if (!file) {
      std::cerr << "dollarex: failed writing '" << raw.out << "'\n";
      return kExitIo;
    }
  }
  print_summary(report, seconds);
  return report.passed ? kExitPass : kExitBoundViolation;
}

}  // namespace dollarex

#include "dollarex/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "dollarex/metrics.hpp"
#include "dollarex/special.hpp"

namespace dollarex {

std::size_t default_truncation(double mu) {
  return static_cast<std::size_t>(std::ceil(mu + 12.0 * std::sqrt(mu) + 30.0));
}

double default_time_step(std::size_t n_max, double mu) {
  return std::min(0.01, 0.5 / (static_cast<double>(n_max) + mu));
}

IntDist equilibrium(double mu, std::optional<std::size_t> n_max) {
  if (!(mu > 0.0)) throw std::invalid_argument("equilibrium: mu must be positive");
  const std::size_t top = n_max.value_or(default_truncation(mu));
  const double lm = std::log(mu);
  auto log_term = [&](std::size_t n) { return static_cast<double>(n) * lm - mu - log_factorial(n); };

  // Tail summed directly; terms decrease geometrically once n > mu.
  double tail = 0.0;
  for (std::size_t n = top + 1;; ++n) {
    const double term = std::exp(log_term(n));
    tail += term;
    if (static_cast<double>(n) > mu && term < 1e-30 * std::max(tail, 1e-300)) break;
    if (term == 0.0 && static_cast<double>(n) > mu) break;
  }
  if (tail > kTailMassLimit)
    throw std::invalid_argument("equilibrium: n_max = " + std::to_string(top) +
                                " leaves Poisson tail mass above 1e-12");

  std::vector<double> pmf(top + 1);
  double mass = 0.0;
  for (std::size_t n = 0; n <= top; ++n) {
    pmf[n] = std::exp(log_term(n));
    mass += pmf[n];
  }
  for (auto& v : pmf) v /= mass;
  return IntDist(std::move(pmf));
}

std::vector<double> apply_L(std::span<const double> p, double mu) {
  const std::size_t size = p.size();
  std::vector<double> out(size, 0.0);
  if (size == 0) return out;
  for (std::size_t n = 0; n < size; ++n) {
    const double nn = static_cast<double>(n);
    const double up = n + 1 < size ? (nn + 1.0) * p[n + 1] : 0.0;
    const double down = n > 0 ? mu * p[n - 1] : 0.0;
    const double out_rate = n + 1 < size ? nn + mu : nn;
    out[n] = up + down - out_rate * p[n];
  }
  return out;
}

double energy(std::span<const double> values, const IntDist& p_star) {
  double total = 0.0;
  for (std::size_t n = 0; n < values.size(); ++n) {
    const double ps = p_star[n];
    if (!(ps > 0.0)) {
      if (values[n] != 0.0) throw std::invalid_argument("energy: mass outside the support of p*");
      continue;
    }
    total += values[n] * values[n] / ps;
  }
  return total;
}

double dissipation(std::span<const double> p, const IntDist& p_star) {
  const std::size_t window = std::max(p.size(), p_star.size());
  auto at = [&](std::size_t n) { return n < p.size() ? p[n] : 0.0; };
  double total = 0.0;
  for (std::size_t n = 0; n + 1 < window; ++n) {
    const double a = p_star[n];
    const double b = p_star[n + 1];
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("dissipation: p* vanishes inside the window");
    const double diff = at(n + 1) / b - at(n) / a;
    total += a * diff * diff;
  }
  return total;
}

double chi2(std::span<const double> p, const IntDist& p_star) {
  const std::size_t window = std::max(p.size(), p_star.size());
  std::vector<double> delta(window);
  for (std::size_t n = 0; n < window; ++n) delta[n] = (n < p.size() ? p[n] : 0.0) - p_star[n];
  return energy(delta, p_star);
}

namespace {

void axpy(std::vector<double>& out, const std::vector<double>& base, double h, const std::vector<double>& k) {
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = base[n] + h * k[n];
}

void rk4_step(std::vector<double>& p, double mu, double h, std::vector<double>& scratch) {
  const auto k1 = apply_L(p, mu);
  axpy(scratch, p, 0.5 * h, k1);
  const auto k2 = apply_L(scratch, mu);
  axpy(scratch, p, 0.5 * h, k2);
  const auto k3 = apply_L(scratch, mu);
  axpy(scratch, p, h, k3);
  const auto k4 = apply_L(scratch, mu);
  for (std::size_t n = 0; n < p.size(); ++n) p[n] += h / 6.0 * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]);
}

void clip_negatives(std::vector<double>& p) {
  bool clipped = false;
  for (std::size_t n = 0; n < p.size(); ++n) {
    if (p[n] >= 0.0) continue;
    if (p[n] < kNegativeClip)
      throw std::runtime_error("integrate: entry " + std::to_string(n) + " fell to " + std::to_string(p[n]) +
                               "; reduce dt or raise n_max");
    p[n] = 0.0;
    clipped = true;
  }
  if (clipped) {
    double mass = 0.0;
    for (double v : p) mass += v;
    for (double& v : p) v /= mass;
  }
}

}  // namespace

OdeRun integrate(const IntDist& p0, const OdeOptions& options) {
  const double mu = options.mu;
  if (!(mu > 0.0)) throw std::invalid_argument("integrate: mu must be positive");
  if (!(options.t_end >= 0.0)) throw std::invalid_argument("integrate: t_end must be >= 0");
  if (std::abs(p0.mass() - 1.0) > kInitialMomentTolerance || std::abs(p0.mean() - mu) > kInitialMomentTolerance)
    throw std::invalid_argument("integrate: p0 must have mass 1 and mean mu");

  OdeRun run;
  run.mu = mu;
  run.n_max = std::max(options.n_max.value_or(default_truncation(mu)), p0.n_max());
  run.p_star = equilibrium(mu, run.n_max);
  const double dt = options.dt.value_or(default_time_step(run.n_max, mu));
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  const double interval = options.sample_interval.value_or(dt);
  if (!(interval > 0.0)) throw std::invalid_argument("integrate: sample interval must be positive");

  const auto samples = static_cast<std::size_t>(std::floor(options.t_end / interval + 1e-9));
  const auto substeps = static_cast<std::size_t>(std::ceil(interval / dt - 1e-9));
  const double h = interval / static_cast<double>(substeps);
  run.dt = h;

  std::vector<double> p = p0.padded(run.n_max).pmf();
  std::vector<double> scratch(p.size());
  run.times.push_back(0.0);
  run.snapshots.emplace_back(p);
  for (std::size_t s = 1; s <= samples; ++s) {
    for (std::size_t j = 0; j < substeps; ++j) {
      rk4_step(p, mu, h, scratch);
      clip_negatives(p);
    }
    run.times.push_back(static_cast<double>(s) * interval);
    run.snapshots.emplace_back(p);
  }
  return run;
}

BakryEmeryReport verify_bakry_emery(const OdeRun& run) {
  const std::size_t count = run.snapshots.size();
  if (count < 3) throw std::invalid_argument("verify_bakry_emery: need at least three snapshots");
  const double spacing = run.times[1] - run.times[0];

  std::vector<double> e(count);
  for (std::size_t i = 0; i < count; ++i) e[i] = chi2(run.snapshots[i], run.p_star);

  BakryEmeryReport report;
  report.min_second_order_margin = std::numeric_limits<double>::infinity();
  const bool wide = count >= 5;
  const std::size_t lo = wide ? 2 : 1;
  for (std::size_t i = lo; i + lo < count; ++i) {
    double d1 = 0.0;
    double d2 = 0.0;
    if (wide) {
      d1 = (e[i - 2] - 8.0 * e[i - 1] + 8.0 * e[i + 1] - e[i + 2]) / (12.0 * spacing);
      d2 = (-e[i - 2] + 16.0 * e[i - 1] - 30.0 * e[i] + 16.0 * e[i + 1] - e[i + 2]) / (12.0 * spacing * spacing);
    } else {
      d1 = (e[i + 1] - e[i - 1]) / (2.0 * spacing);
      d2 = (e[i + 1] - 2.0 * e[i] + e[i - 1]) / (spacing * spacing);
    }
    const double predicted = -2.0 * run.mu * dissipation(run.snapshots[i].pmf(), run.p_star);
    const double residual = std::abs(d1 - predicted) / std::max(std::abs(d1), 1e-14);
    const double margin = d2 + 2.0 * d1;
    report.times.push_back(run.times[i]);
    report.energy_slope.push_back(d1);
    report.predicted_slope.push_back(predicted);
    report.residual.push_back(residual);
    report.second_order_margin.push_back(margin);
    report.max_residual = std::max(report.max_residual, residual);
    report.min_second_order_margin = std::min(report.min_second_order_margin, margin);
  }
  if (report.times.empty()) report.min_second_order_margin = 0.0;
  report.identity_holds = report.max_residual <= kIdentityTolerance;
  report.inequality_holds = report.min_second_order_margin >= -kSecondOrderTolerance;
  return report;
}

DecayFit fit_decay_rate(const OdeRun& run) {
  if (run.times.size() < 2) throw std::invalid_argument("fit_decay_rate: need at least two snapshots");
  const double t_end = run.times.back();
  std::vector<double> ts;
  std::vector<double> logs;
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    if (run.times[i] < 0.5 * t_end - 1e-12) continue;
    const double c = chi2(run.snapshots[i], run.p_star);
    if (!(c >= kChi2Floor))
      throw std::domain_error("fit_decay_rate: chi2 underflow at t = " + std::to_string(run.times[i]) +
                              " (shrink t_end)");
    ts.push_back(run.times[i]);
    logs.push_back(std::log(c));
  }
  const LinearFit fit = fit_line(ts, logs);
  return DecayFit{-fit.slope, fit.r_squared};
}

W1Chi2Check w1_chi2_bound_check(const IntDist& p, const IntDist& p_star, double mu) {
  W1Chi2Check check;
  check.w1 = w1_int(p, p_star);
  check.bound = std::sqrt(mu * mu + mu) * std::sqrt(chi2(p, p_star));
  check.holds = check.w1 <= check.bound;
  return check;
}

}  // namespace dollarex

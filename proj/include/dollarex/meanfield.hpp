#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dollarex/int_dist.hpp"

namespace dollarex {

// ceil(mu + 12 sqrt(mu) + 30): Poisson(mu) tail beyond it is < 1e-12 for mu <= 100.
std::size_t default_truncation(double mu);

// Largest Poisson tail mass that equilibrium() accepts.
inline constexpr double kTailMassLimit = 1e-12;
// Entries down to this negative value past an RK4 step are clipped to zero.
inline constexpr double kNegativeClip = -1e-12;
// Accepted drift of p0 away from the simplex slice {mass 1, mean mu}.
inline constexpr double kInitialMomentTolerance = 1e-10;

// Poisson(mu) on {0, ..., n_max}, renormalized. Throws std::invalid_argument
// when the discarded tail exceeds kTailMassLimit.
IntDist equilibrium(double mu, std::optional<std::size_t> n_max = {});

// Mean-field generator (n+1) p_{n+1} + mu p_{n-1} - (n + mu) p_n on the
// window of p. The last index reflects: its outflow to n_max + 1 is dropped,
// so total mass is conserved exactly.
std::vector<double> apply_L(std::span<const double> p, double mu);
inline std::vector<double> apply_L(const IntDist& p, double mu) { return apply_L(p.pmf(), mu); }

// sum_n values_n^2 / p*_n. Accepts signed sequences, e.g. p - p*.
double energy(std::span<const double> values, const IntDist& p_star);
// sum_n p*_n (p_{n+1}/p*_{n+1} - p_n/p*_n)^2 over the window.
double dissipation(std::span<const double> p, const IntDist& p_star);
double chi2(std::span<const double> p, const IntDist& p_star);
inline double chi2(const IntDist& p, const IntDist& p_star) { return chi2(p.pmf(), p_star); }

struct OdeOptions {
  double mu = 1.0;
  double t_end = 1.0;
  std::optional<double> dt;               // default min(0.01, 0.5 / (n_max + mu))
  std::optional<double> sample_interval;  // default: every step
  std::optional<std::size_t> n_max;       // default: default_truncation(mu)
};

double default_time_step(std::size_t n_max, double mu);

struct OdeRun {
  std::vector<double> times;
  std::vector<IntDist> snapshots;
  IntDist p_star;
  double mu = 0.0;
  std::size_t n_max = 0;
  double dt = 0.0;
  std::string method = "rk4";
};

// Classical RK4 on dp/dt = L[p]. Snapshots are uniformly spaced; the step is
// shrunk so each spacing is a whole number of steps. Throws
// std::invalid_argument if p0 is off the mass/mean slice, std::runtime_error
// if an entry drops below kNegativeClip.
OdeRun integrate(const IntDist& p0, const OdeOptions& options);

struct BakryEmeryReport {
  std::vector<double> times;           // interior snapshot times checked
  std::vector<double> energy_slope;    // finite-difference dE/dt
  std::vector<double> predicted_slope; // -2 mu D[p(t)]
  std::vector<double> residual;        // |slope + 2 mu D| / max(|slope|, 1e-14)
  std::vector<double> second_order_margin;  // E'' + 2 E' (should be >= 0)
  double max_residual = 0.0;
  double min_second_order_margin = 0.0;
  bool identity_holds = false;    // max_residual <= 1e-4
  bool inequality_holds = false;  // min margin >= -1e-6
};

inline constexpr double kIdentityTolerance = 1e-4;
inline constexpr double kSecondOrderTolerance = 1e-6;

// Five-point centered differences when there are at least five snapshots,
// three-point otherwise. Throws std::invalid_argument with fewer than three.
BakryEmeryReport verify_bakry_emery(const OdeRun& run);

struct DecayFit {
  double rate = 0.0;
  double r_squared = 0.0;
};

// Below this, chi2 is treated as numerically zero.
inline constexpr double kChi2Floor = 1e-30;

// Negated least-squares slope of log chi2 against t over [t_end/2, t_end].
// Throws std::domain_error if chi2 falls below kChi2Floor in the window.
DecayFit fit_decay_rate(const OdeRun& run);

struct W1Chi2Check {
  double w1 = 0.0;
  double bound = 0.0;  // sqrt(mu^2 + mu) * sqrt(chi2)
  bool holds = false;
};

W1Chi2Check w1_chi2_bound_check(const IntDist& p, const IntDist& p_star, double mu);

}  // namespace dollarex

#include <cmath>
#include <vector>

#include "doctest.h"
#include "dollarex/meanfield.hpp"
#include "dollarex/metrics.hpp"
#include "dollarex/random.hpp"
#include "oracles.hpp"

using namespace dollarex;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t n = 0; n < std::max(a.size(), b.size()); ++n)
    d = std::max(d, std::abs((n < a.size() ? a[n] : 0.0) - (n < b.size() ? b[n] : 0.0)));
  return d;
}

IntDist two_point(int a, int b, double mu) {
  // Weights chosen so that the mean is exactly mu.
  std::vector<double> p(static_cast<std::size_t>(b) + 1, 0.0);
  const double wb = (mu - a) / (b - a);
  p[a] = 1.0 - wb;
  p[b] = wb;
  return IntDist(p);
}

}  // namespace

TEST_CASE("equilibrium") {
  CHECK(equilibrium(1.0)[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  const auto p10 = equilibrium(10.0);
  CHECK((p10.mode() == 9 || p10.mode() == 10));
  CHECK(std::abs(p10.mass() - 1.0) <= 1e-12);
  for (double mu : {0.5, 1.0, 3.0, 10.0, 50.0}) CHECK(std::abs(equilibrium(mu).mean() - mu) <= 1e-10);
  CHECK_THROWS_AS(equilibrium(10.0, 20), std::invalid_argument);
  CHECK_THROWS_AS(equilibrium(0.0), std::invalid_argument);
}

TEST_CASE("generator") {
  for (double mu : {1.0, 5.0, 20.0}) {
    const auto ps = equilibrium(mu);
    const auto l = apply_L(ps, mu);
    double worst = 0.0;
    for (double v : l) worst = std::max(worst, std::abs(v));
    CHECK(worst <= 1e-12);
  }

  const auto l0 = apply_L(IntDist::delta(0).padded(10), 1.0);
  CHECK(l0[0] == doctest::Approx(-1.0));
  CHECK(l0[1] == doctest::Approx(1.0));
  CHECK(l0[2] == 0.0);

  const auto l5 = apply_L(IntDist::delta(5).padded(20), 2.0);
  CHECK(l5[4] == doctest::Approx(5.0));
  CHECK(l5[5] == doctest::Approx(-7.0));
  CHECK(l5[6] == doctest::Approx(2.0));

  // Mass is conserved; the mean is conserved away from the truncation edge.
  RandomStream rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> p(60, 0.0);
    for (std::size_t n = 0; n < 30; ++n) p[n] = rng.uniform01();
    const auto l = apply_L(p, 3.0);
    double sum = 0.0, first = 0.0, mass = 0.0, mean = 0.0;
    for (std::size_t n = 0; n < l.size(); ++n) {
      sum += l[n];
      first += n * l[n];
      mass += p[n];
      mean += n * p[n];
    }
    CHECK(std::abs(sum) <= 1e-12 * mass);
    // d/dt E[n] = mu * mass - E[n]; it vanishes on the mass-1, mean-mu slice.
    CHECK(first == doctest::Approx(3.0 * mass - mean).epsilon(1e-10));
  }
}

TEST_CASE("functionals") {
  const auto p1 = equilibrium(1.0);
  // (1 - e^{-1})^2 / e^{-1} from n = 0 plus the untouched tail 1 - e^{-1}.
  double direct = (1.0 - p1[0]) * (1.0 - p1[0]) / p1[0];
  for (std::size_t n = 1; n < p1.size(); ++n) direct += p1[n];
  CHECK(chi2(IntDist::delta(0), p1) == doctest::Approx(direct).epsilon(1e-12));
  CHECK(chi2(IntDist::delta(0), p1) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-9));
  CHECK(chi2(p1, p1) == doctest::Approx(0.0));
  CHECK(dissipation(p1.pmf(), p1) == doctest::Approx(0.0));

  const auto ps = equilibrium(4.0);
  const auto p = two_point(1, 9, 4.0).padded(ps.n_max());
  std::vector<double> diff(ps.size());
  for (std::size_t n = 0; n < diff.size(); ++n) diff[n] = p[n] - ps[n];
  CHECK(chi2(p, ps) == doctest::Approx(energy(diff, ps)).epsilon(1e-14));
  CHECK(dissipation(p.pmf(), ps) > 0.0);
}

TEST_CASE("integration from equilibrium stays put") {
  const double mu = 5.0;
  const auto run = integrate(equilibrium(mu), OdeOptions{mu, 5.0, 0.01, 0.5, std::nullopt});
  CHECK(run.times.size() == 11);
  for (const auto& s : run.snapshots) CHECK(max_abs_diff(s.pmf(), run.p_star.pmf()) <= 1e-10);
}

TEST_CASE("integration rejects bad input") {
  CHECK_THROWS_AS(integrate(IntDist::delta(3), OdeOptions{5.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(integrate(IntDist::delta(5), OdeOptions{5.0, 1.0, -0.1}), std::invalid_argument);
  CHECK_THROWS_AS(integrate(IntDist::delta(5), OdeOptions{0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("integration matches the exact point-mass solution") {
  // From delta_mu: p(t) = Binomial(mu, e^{-t}) * Poisson(mu (1 - e^{-t})).
  for (int a : {1, 3, 5, 12}) {
    const double mu = a;
    const auto run = integrate(IntDist::delta(a), OdeOptions{mu, 4.0, 0.002, 0.5, std::nullopt});
    for (std::size_t i = 0; i < run.times.size(); ++i) {
      const auto exact = oracle::meanfield_point_mass_solution(a, mu, run.times[i], run.n_max);
      INFO("a " << a << " t " << run.times[i]);
      CHECK(max_abs_diff(run.snapshots[i].pmf(), exact) <= 1e-10);
    }
  }
}

TEST_CASE("RK4 converges at fourth order") {
  const double mu = 4.0, t = 2.0;
  auto error_at = [&](double dt) {
    const auto run = integrate(IntDist::delta(4), OdeOptions{mu, t, dt, t, std::nullopt});
    const auto exact = oracle::meanfield_point_mass_solution(4, mu, t, run.n_max);
    return max_abs_diff(run.snapshots.back().pmf(), exact);
  };
  const double coarse = error_at(0.04);
  const double fine = error_at(0.02);
  INFO("coarse " << coarse << " fine " << fine);
  CHECK(coarse > 1e-12);
  CHECK(coarse / fine > 10.0);
  CHECK(coarse / fine < 22.0);
}

TEST_CASE("chi2 decreases strictly and the mass/mean slice is preserved") {
  const double mu = 5.0;
  const auto run = integrate(IntDist::delta(5), OdeOptions{mu, 8.0, std::nullopt, 0.05, std::nullopt});
  double prev = INFINITY;
  for (std::size_t i = 0; i < run.snapshots.size(); ++i) {
    const auto& s = run.snapshots[i];
    const double c = chi2(s, run.p_star);
    CHECK(c < prev);
    prev = c;
    CHECK(std::abs(s.mass() - 1.0) <= 1e-10);
    CHECK(std::abs(s.mean() - mu) <= 1e-9);
    for (double v : s.pmf()) CHECK(v >= 0.0);
    // Spectral-gap envelope: chi2(t) <= chi2(0) e^{-t}.
    CHECK(c <= chi2(run.snapshots[0], run.p_star) * std::exp(-run.times[i]) * (1.0 + 1e-9));
  }
}

TEST_CASE("Bakry-Emery identity and second-order inequality") {
  SUBCASE("from a point mass, every step") {
    const auto run = integrate(IntDist::delta(3), OdeOptions{3.0, 3.0, std::nullopt, std::nullopt, std::nullopt});
    const auto be = verify_bakry_emery(run);
    CHECK(be.identity_holds);
    CHECK(be.max_residual <= 1e-4);
    CHECK(be.inequality_holds);
  }
  SUBCASE("on a 50-point grid") {
    const auto run = integrate(two_point(2, 10, 4.0), OdeOptions{4.0, 4.9, std::nullopt, 0.1, std::nullopt});
    REQUIRE(run.times.size() == 50);
    const auto be = verify_bakry_emery(run);
    CHECK(be.inequality_holds);
    for (double m : be.second_order_margin) CHECK(m >= -1e-6);
  }
  SUBCASE("from equilibrium") {
    const auto run = integrate(equilibrium(2.0), OdeOptions{2.0, 1.0, 0.01, 0.01, std::nullopt});
    const auto be = verify_bakry_emery(run);
    CHECK(be.identity_holds);
    CHECK(be.inequality_holds);
  }
  SUBCASE("too few snapshots") {
    const auto run = integrate(IntDist::delta(2), OdeOptions{2.0, 0.1, 0.01, 0.1, std::nullopt});
    CHECK_THROWS_AS(verify_bakry_emery(run), std::invalid_argument);
  }
}

TEST_CASE("decay rate") {
  SUBCASE("undefined at equilibrium") {
    const auto run = integrate(equilibrium(5.0), OdeOptions{5.0, 4.0, std::nullopt, 0.1, std::nullopt});
    CHECK_THROWS_AS(fit_decay_rate(run), std::domain_error);
  }
  SUBCASE("from a point mass at the mean") {
    const double mu = 5.0, t_end = 10.0;
    const auto run = integrate(IntDist::delta(5), OdeOptions{mu, t_end, std::nullopt, 0.05, std::nullopt});
    const auto fit = fit_decay_rate(run);
    CHECK(fit.rate >= 1.0 - 1e-3);
    CHECK(fit.rate >= 2.0);

    // Same fit on the exact solution.
    std::vector<double> ts, logs;
    for (double t = t_end / 2; t <= t_end + 1e-9; t += 0.05) {
      const IntDist exact(oracle::meanfield_point_mass_solution(5, mu, t, run.n_max));
      ts.push_back(t);
      logs.push_back(std::log(chi2(exact, run.p_star)));
    }
    const auto reference = fit_line(ts, logs);
    CHECK(fit.rate == doctest::Approx(-reference.slope).epsilon(1e-3));
    // The mean constraint removes the rate-1 mode; the slowest surviving mode is e^{-2t} in p, e^{-4t} in chi2.
    CHECK(fit.rate == doctest::Approx(4.0).epsilon(1e-3));
    CHECK(fit.r_squared > 0.999);
  }
}

TEST_CASE("W1 and chi2 inequality") {
  const auto ps = equilibrium(4.0);
  const auto at_eq = w1_chi2_bound_check(ps, ps, 4.0);
  CHECK(at_eq.w1 == doctest::Approx(0.0));
  CHECK(at_eq.holds);
  const auto pm = w1_chi2_bound_check(IntDist::delta(4), ps, 4.0);
  CHECK(pm.holds);
  CHECK(pm.bound == doctest::Approx(std::sqrt(20.0) * std::sqrt(chi2(IntDist::delta(4), ps))));

  const auto run = integrate(IntDist::delta(3), OdeOptions{3.0, 6.0, std::nullopt, 0.1, std::nullopt});
  for (const auto& s : run.snapshots) CHECK(w1_chi2_bound_check(s, run.p_star, 3.0).holds);
}

TEST_CASE("W1 to equilibrium stays within 2 mu e^{-t}") {
  const double mu = 5.0;
  for (auto p0 : {two_point(1, 9, mu), two_point(0, 25, mu), IntDist::delta(5)}) {
    const auto run = integrate(p0, OdeOptions{mu, 8.0, std::nullopt, 0.25, std::nullopt});
    for (std::size_t i = 0; i < run.times.size(); ++i)
      CHECK(w1_int(run.snapshots[i], run.p_star) <= 2.0 * mu * std::exp(-run.times[i]) + 1e-9);
  }
}

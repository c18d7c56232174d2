#include <cmath>
#include <vector>

#include "doctest.h"
#include "dollarex/metrics.hpp"
#include "dollarex/random.hpp"
#include "dollarex/special.hpp"
#include "oracles.hpp"

using namespace dollarex;

namespace {

IntDist random_dist(RandomStream& rng, std::size_t support) {
  std::vector<double> p(support);
  double total = 0.0;
  for (auto& v : p) {
    // Sparse-ish: roughly a third of the entries are zero.
    v = rng.uniform01() < 0.33 ? 0.0 : rng.uniform01();
    total += v;
  }
  if (total == 0.0) {
    p[0] = 1.0;
    total = 1.0;
  }
  for (auto& v : p) v /= total;
  return IntDist(p);
}

}  // namespace

TEST_CASE("IntDist construction and accessors") {
  IntDist p({0.25, 0.5, 0.25});
  CHECK(p.n_max() == 2);
  CHECK(p.mass() == doctest::Approx(1.0));
  CHECK(p.mean() == doctest::Approx(1.0));
  CHECK(p.mode() == 1);
  CHECK(p[7] == 0.0);
  CHECK(p.cdf(0) == doctest::Approx(0.25));
  CHECK(p.cdf(100) == doctest::Approx(1.0));
  CHECK(p.padded(5).size() == 6);
  CHECK(p.padded(5)[5] == 0.0);

  CHECK_THROWS_AS(IntDist(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(IntDist({0.5, -0.1}), std::invalid_argument);
  CHECK_THROWS_AS(IntDist({NAN}), std::invalid_argument);

  const std::vector<std::uint64_t> counts{1, 0, 3, 0, 0};
  const auto e = IntDist::from_counts(counts);
  CHECK(e.n_max() == 2);
  CHECK(e[2] == doctest::Approx(0.75));
  const std::vector<std::uint64_t> none{0, 0};
  CHECK_THROWS(IntDist::from_counts(none));
}

TEST_CASE("w1_int on point masses") {
  CHECK(w1_int(IntDist::delta(0), IntDist::delta(3)) == doctest::Approx(3.0));
  for (std::size_t a = 0; a <= 50; a += 7)
    for (std::size_t b = 0; b <= 50; b += 5)
      CHECK(w1_int(IntDist::delta(a), IntDist::delta(b)) ==
            doctest::Approx(std::abs(static_cast<double>(a) - static_cast<double>(b))));
  const IntDist p({0.1, 0.2, 0.3, 0.4});
  CHECK(w1_int(p, p) == 0.0);
}

TEST_CASE("w1_int rejects unequal masses") {
  CHECK_THROWS_AS(w1_int(IntDist({0.5, 0.4}), IntDist::delta(0)), std::invalid_argument);
}

TEST_CASE("w1_int matches a transport LP on random instances") {
  RandomStream rng(20240601);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_dist(rng, 1 + rng.uniform_index(30));
    const auto q = random_dist(rng, 1 + rng.uniform_index(30));
    const double lp = oracle::transport_lp(p.pmf(), q.pmf());
    CHECK(std::abs(w1_int(p, q) - lp) <= 1e-9);
  }
}

TEST_CASE("w1_int matches a transport LP for Binomial(20, 1/2) vs Poisson(10)") {
  const auto b = binomial_pmf(20, 0.5, 60);
  const auto p = poisson_pmf(10.0, 60);
  // Poisson mass past 60 is below 1e-20, so both windows are effectively complete.
  const double lp = oracle::transport_lp(b.pmf(), p.pmf());
  CHECK(std::abs(w1_int(b, p) - lp) <= 1e-9);
}

TEST_CASE("w1_int satisfies the metric axioms") {
  RandomStream rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const auto p = random_dist(rng, 1 + rng.uniform_index(20));
    const auto q = random_dist(rng, 1 + rng.uniform_index(20));
    const auto r = random_dist(rng, 1 + rng.uniform_index(20));
    const double pq = w1_int(p, q);
    CHECK(pq >= 0.0);
    CHECK(w1_int(p, p) == doctest::Approx(0.0));
    CHECK(pq == doctest::Approx(w1_int(q, p)));
    CHECK(pq <= w1_int(p, r) + w1_int(r, q) + 1e-12);
  }
}

TEST_CASE("tv_distance basics") {
  CHECK(tv_distance(IntDist::delta(0), IntDist::delta(1)) == doctest::Approx(1.0));
  CHECK(tv_distance(IntDist({0.5, 0.5}), IntDist({0.5, 0.5})) == 0.0);
  CHECK(tv_distance(IntDist({0.5, 0.5}), IntDist({1.0})) == doctest::Approx(0.5));
}

TEST_CASE("binomial and poisson pmfs") {
  const auto b = binomial_pmf(2, 0.5);
  REQUIRE(b.size() == 3);
  CHECK(b[0] == doctest::Approx(0.25));
  CHECK(b[1] == doctest::Approx(0.5));
  CHECK(b[2] == doctest::Approx(0.25));
  const auto p = poisson_pmf(1.0, 3);
  CHECK(p[0] == doctest::Approx(std::exp(-1.0)));
  CHECK(p[3] == doctest::Approx(std::exp(-1.0) / 6.0));
  CHECK(p.mass() < 1.0);
  CHECK(binomial_pmf(1000, 0.01).mean() == doctest::Approx(10.0));
}

TEST_CASE("W1 between Binomial(mu N, 1/N) and Poisson(mu) respects the coupling bound") {
  for (int n = 2; n <= 11; ++n) {
    for (int mu = 1; mu <= 10; ++mu) {
      const std::size_t window = static_cast<std::size_t>(mu * n + 12 * std::sqrt(mu) + 40);
      const auto b = binomial_pmf(static_cast<std::uint64_t>(mu * n), 1.0 / n, window);
      const auto p = poisson_pmf(mu, window);
      CHECK(w1_int(b, p) <= std::sqrt(2.0 * mu / M_PI) / std::sqrt(static_cast<double>(n)));
    }
  }
}

TEST_CASE("StreamingStats") {
  SUBCASE("small sample") {
    StreamingStats s;
    for (double x : {1.0, 2.0, 3.0}) s.observe(x);
    const auto sum = s.summarize();
    CHECK(sum.mean == doctest::Approx(2.0));
    CHECK(sum.variance == doctest::Approx(1.0));
    REQUIRE(sum.se.has_value());
    CHECK(*sum.se == doctest::Approx(1.0 / std::sqrt(3.0)));
    CHECK(sum.count == 3);
    CHECK(s.min() == 1.0);
    CHECK(s.max() == 3.0);
  }
  SUBCASE("single observation has no standard error") {
    StreamingStats s;
    s.observe(4.0);
    CHECK_FALSE(s.summarize().se.has_value());
    CHECK(std::isnan(s.variance()));
  }
  SUBCASE("standard normals") {
    RandomStream rng(99);
    StreamingStats s;
    for (int i = 0; i < 1000000; ++i) s.observe(rng.normal());
    CHECK(std::abs(s.mean()) <= 0.004);
    CHECK(s.variance() == doctest::Approx(1.0).epsilon(0.01));
  }
  SUBCASE("merge equals sequential accumulation") {
    RandomStream rng(5);
    StreamingStats all, left, right;
    for (int i = 0; i < 1000; ++i) {
      const double x = 100.0 + rng.exponential(0.5);
      all.observe(x);
      (i < 377 ? left : right).observe(x);
    }
    left.merge(right);
    CHECK(left.count() == all.count());
    CHECK(left.mean() == doctest::Approx(all.mean()).epsilon(1e-12));
    CHECK(left.variance() == doctest::Approx(all.variance()).epsilon(1e-10));
    CHECK(left.min() == all.min());
    CHECK(left.max() == all.max());
    StreamingStats empty;
    left.merge(empty);
    CHECK(left.count() == all.count());
    empty.merge(all);
    CHECK(empty.mean() == doctest::Approx(all.mean()));
  }
}

TEST_CASE("w1_product_upper") {
  const std::vector<double> zeros{0.0, 0.0};
  CHECK(w1_product_upper(zeros) == 0.0);
  const std::vector<double> same{0.3, 0.3, 0.3};
  CHECK(w1_product_upper(same) == doctest::Approx(0.3));
  const std::vector<double> mixed{1.0, 0.0, 0.5, 0.5};
  CHECK(w1_product_upper(mixed) == doctest::Approx(0.5));
  CHECK_THROWS(w1_product_upper(std::span<const double>{}));
}

TEST_CASE("jackknife and pooling") {
  const std::vector<Histogram> same{{1, 2, 1}, {1, 2, 1}, {1, 2, 1}};
  const auto pooled = pool_histograms(same);
  CHECK(pooled[1] == doctest::Approx(0.5));
  CHECK(jackknife_w1_se(same, IntDist::delta(1)) == doctest::Approx(0.0));

  // Replications of a Poisson sample: the jackknife SE should be close to the
  // spread of W1 across independent pooled estimates.
  RandomStream rng(3);
  const auto ref = poisson_pmf(2.0, 40);
  auto draw_hist = [&](int draws) {
    Histogram h(41, 0);
    for (int i = 0; i < draws; ++i) {
      const double u = rng.uniform01();
      std::size_t k = 0;
      while (k < 40 && u > ref.cdf(k)) ++k;
      ++h[k];
    }
    return h;
  };
  StreamingStats spread;
  double jack = 0.0;
  for (int outer = 0; outer < 200; ++outer) {
    std::vector<Histogram> reps;
    for (int r = 0; r < 20; ++r) reps.push_back(draw_hist(50));
    spread.observe(w1_int(pool_histograms(reps), ref.padded(40)));
    if (outer == 0) jack = jackknife_w1_se(reps, ref);
  }
  CHECK(jack > 0.0);
  CHECK(jack < 4.0 * std::sqrt(spread.variance()));
  CHECK(jack > 0.25 * std::sqrt(spread.variance()));

  const std::vector<Histogram> one{{1}};
  CHECK_THROWS(jackknife_w1_se(one, IntDist::delta(0)));
}

TEST_CASE("fit_line") {
  const std::vector<double> x{0, 1, 2, 3};
  const std::vector<double> y{1, 3, 5, 7};
  const auto f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r_squared == doctest::Approx(1.0));
}

TEST_CASE("log_factorial agrees with lgamma across the table boundary") {
  for (std::uint64_t n = 0; n <= 5000; n += (n < 300 ? 1 : 37)) {
    const double ref = std::lgamma(static_cast<double>(n) + 1.0);
    CHECK(std::abs(log_factorial(n) - ref) <= 1e-10 * std::max(1.0, ref));
  }
  CHECK(log_factorial(0) == 0.0);
  CHECK(log_factorial(1) == 0.0);
  CHECK(log_factorial(kLogFactorialTableSize) ==
        doctest::Approx(std::lgamma(kLogFactorialTableSize + 1.0)).epsilon(1e-14));
}

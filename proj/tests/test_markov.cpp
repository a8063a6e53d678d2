#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numeric>

#include "funnelrs/markov.hpp"

using namespace funnelrs;

TEST_CASE("theory reproduces the four panel cases") {
  auto t = theory({0.12, 0.12});
  CHECK(t.wp == doctest::Approx(0.5));
  CHECK(t.v_factor == doctest::Approx(0.37).epsilon(0.005 / 0.37));

  t = theory({0.5, 0.5});
  CHECK(t.wp == doctest::Approx(0.5));
  CHECK(t.v_factor == doctest::Approx(1.0));
  CHECK(t.c1 == doctest::Approx(0.0));

  t = theory({0.88, 0.88});
  CHECK(t.wp == doctest::Approx(0.5));
  CHECK(std::abs(t.v_factor - 2.71) < 0.005);
  CHECK(t.c1 == doctest::Approx(0.76));

  t = theory({0.88, 0.5});
  CHECK(std::abs(t.wp - 0.807) < 0.005);
  CHECK(std::abs(t.v_factor - 1.49) < 0.005);
}

TEST_CASE("theory invariants") {
  // V = 1 iff p11 + p00 = 1
  CHECK(theory({0.3, 0.7}).v_factor == doctest::Approx(1.0));
  CHECK(theory({0.9, 0.1}).v_factor == doctest::Approx(1.0));
  CHECK(theory({0.6, 0.6}).v_factor != doctest::Approx(1.0));
  // symmetric case closed forms
  for (double p : {0.05, 0.3, 0.62, 0.9}) {
    const auto t = theory({p, p});
    CHECK(t.wp == doctest::Approx(0.5));
    CHECK(t.v_factor == doctest::Approx(std::sqrt(p / (1.0 - p))).epsilon(1e-12));
    CHECK(t.c1 == doctest::Approx(2.0 * p - 1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(theory({1.0, 1.0}), std::invalid_argument);
  CHECK(theory({0.5, 0.5}).sigma0(10000) == doctest::Approx(0.005));
}

TEST_CASE("self_transition_from_v worked values and round trip") {
  CHECK(self_transition_from_v(2.21) == doctest::Approx(0.830).epsilon(1e-3));
  CHECK(self_transition_from_v(1.0) == doctest::Approx(0.5));
  CHECK(self_transition_from_v(2.708) == doctest::Approx(0.88).epsilon(1e-3));
  CHECK_THROWS_AS(self_transition_from_v(0.0), std::invalid_argument);
  for (double p = 0.01; p < 1.0; p += 0.01) {
    CHECK(self_transition_from_v(theory({p, p}).v_factor) ==
          doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("correlation_at_distance") {
  CHECK(correlation_at_distance(0.83, 1) == doctest::Approx(0.66));
  CHECK(correlation_at_distance(0.5, 7) == doctest::Approx(0.0));
  CHECK(correlation_at_distance(0.83, 30) == doctest::Approx(std::pow(0.66, 30)));
  CHECK(correlation_at_distance(0.83, 30) < 1e-4);  // practically zero by k ~ 30
}

TEST_CASE("generate determinism and validation") {
  const auto a = generate({0.83, 0.83}, 5000, 7);
  const auto b = generate({0.83, 0.83}, 5000, 7);
  CHECK(a.bits == b.bits);
  const auto c = generate({0.83, 0.83}, 5000, 8);
  CHECK(a.bits != c.bits);
  CHECK_THROWS_AS(generate({1.0, 1.0}, 100, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate({0.5, 0.5}, 0, 1), std::invalid_argument);
}

TEST_CASE("long-run bit mean approaches the stationary mean") {
  const std::int64_t n = 200000;
  int combo = 0;
  for (double p11 : {0.12, 0.5, 0.88}) {
    for (double p00 : {0.12, 0.5, 0.88}) {
      const auto t = theory({p11, p00});
      const double prop = simulate_proportion({p11, p00}, n, 1234 + combo++);
      const double sd = t.v_factor * t.sigma0(n);
      CHECK(std::abs(prop - t.wp) < 4.0 * sd);
    }
  }
}

TEST_CASE("sample sd of study means matches the broadened binomial sd") {
  const std::int64_t n = 10000;
  const int reps = 400;
  for (double p : {0.12, 0.5, 0.88}) {
    std::vector<double> props(reps);
    for (int r = 0; r < reps; ++r)
      props[r] = simulate_proportion({p, p}, n, 777000 + static_cast<std::uint64_t>(r));
    const double mean = std::accumulate(props.begin(), props.end(), 0.0) / reps;
    double ss = 0.0;
    for (double v : props) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (reps - 1));
    const auto t = theory({p, p});
    const double expected = t.v_factor * 0.5 / std::sqrt(static_cast<double>(n));
    CHECK(sd == doctest::Approx(expected).epsilon(0.10));
  }
}

TEST_CASE("empirical lag correlations follow the geometric decay law") {
  const auto seq = generate({0.83, 0.83}, 1000000, 20250824);
  const double mc_se = 1.0 / std::sqrt(1e6);
  for (std::int64_t k : {1, 2, 5, 10, 30}) {
    const double expect = correlation_at_distance(0.83, static_cast<int>(k));
    // 3 Monte-Carlo standard errors, inflated for the serial dependence
    CHECK(std::abs(empirical_correlation(seq, k) - expect) < 3.0 * 2.2 * mc_se);
  }
  CHECK(std::abs(empirical_correlation(seq, 1) - 0.66) < 0.01);
  CHECK(std::abs(empirical_correlation(seq, 30)) < 0.01);
}

TEST_CASE("memoryless sequence is white") {
  const auto seq = generate({0.5, 0.5}, 1000000, 3);
  CHECK(std::abs(empirical_correlation(seq, 1)) < 4.0 / std::sqrt(1e6));
}

TEST_CASE("empirical_correlation edge cases") {
  BitSequence constant{std::vector<std::uint8_t>(100, 1), 0, {0.9, 0.1}};
  CHECK_THROWS_AS(empirical_correlation(constant, 1), std::domain_error);
  const auto seq = generate({0.5, 0.5}, 10, 1);
  CHECK_THROWS_AS(empirical_correlation(seq, 9), std::invalid_argument);
}

TEST_CASE("product-form estimator agrees with theory for the symmetric chain") {
  const auto seq = generate({0.83, 0.83}, 1000000, 5);
  // <b_n b_{n+1}> for a 0/1 chain at wp = 0.5: (1 + C1)/4
  CHECK(product_correlation(seq, 1) == doctest::Approx((1.0 + 0.66) / 4.0).epsilon(0.02));
}

TEST_CASE("funnel_simulation parallel matches the serial reference") {
  const std::vector<std::int64_t> sizes{100, 1000, 10000};
  const auto par = funnel_simulation({0.88, 0.88}, sizes, 30, 99);
  const auto ser = funnel_simulation_serial({0.88, 0.88}, sizes, 30, 99);
  REQUIRE(par.size() == ser.size());
  for (std::size_t i = 0; i < par.size(); ++i) {
    CHECK(par[i].n == ser[i].n);
    CHECK(par[i].replication == ser[i].replication);
    CHECK(par[i].proportion == ser[i].proportion);
  }
}

TEST_CASE("funnel_simulation coverage behaviour") {
  std::vector<std::int64_t> sizes;
  for (double ln = 2.0; ln <= 6.01; ln += 0.25)
    sizes.push_back(static_cast<std::int64_t>(std::pow(10.0, ln)));

  auto count_inside = [&](const std::vector<FunnelPoint>& pts, double v) {
    int inside = 0;
    for (const auto& p : pts) {
      const double half = 1.96 * v * 0.5 / std::sqrt(static_cast<double>(p.n));
      if (p.proportion > 0.5 - half && p.proportion < 0.5 + half) ++inside;
    }
    return static_cast<double>(inside) / static_cast<double>(pts.size());
  };

  const auto chance = funnel_simulation({0.5, 0.5}, sizes, 30, 11);
  CHECK(count_inside(chance, 1.0) > 0.90);

  const auto broad = funnel_simulation({0.88, 0.88}, sizes, 30, 12);
  CHECK(count_inside(broad, 2.7078) > 0.90);
  CHECK(count_inside(broad, 1.0) < 0.75);  // far more than 5% spill out of V = 1
}

TEST_CASE("single-bit studies only produce 0 or 1") {
  const std::vector<std::int64_t> sizes{1};
  for (const auto& p : funnel_simulation({0.88, 0.88}, sizes, 50, 4)) {
    CHECK((p.proportion == 0.0 || p.proportion == 1.0));
  }
}

TEST_CASE("batch_means") {
  std::vector<std::uint8_t> bits{1, 1, 0, 0, 1, 0, 1};
  const auto m2 = batch_means(bits, 2);
  REQUIRE(m2.size() == 3);  // trailing partial batch dropped
  CHECK(m2[0] == doctest::Approx(1.0));
  CHECK(m2[1] == doctest::Approx(0.0));
  CHECK(m2[2] == doctest::Approx(0.5));

  const auto id = batch_means(bits, 1);
  REQUIRE(id.size() == bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) CHECK(id[i] == doctest::Approx(bits[i]));

  CHECK(batch_means(bits, 7).size() == 1);
  CHECK_THROWS_AS(batch_means(bits, 8), std::invalid_argument);
  CHECK_THROWS_AS(batch_means(bits, 0), std::invalid_argument);
}

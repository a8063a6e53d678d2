#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "funnelrs/domain.hpp"
#include "funnelrs/markov.hpp"
#include "funnelrs/rng.hpp"

using namespace funnelrs;

TEST_CASE("effect_size worked values") {
  CHECK(effect_size(0.52, 2) == doctest::Approx(0.52));
  CHECK(effect_size(0.25, 4) == doctest::Approx(0.5));
  // oracle: exact rational 0.40*3 / (1 + 0.40*2) = 1.2 / 1.8
  CHECK(effect_size(0.40, 4) == doctest::Approx(1.2 / 1.8).epsilon(1e-12));
  CHECK(effect_size(0.0, 3) == doctest::Approx(0.0));
  CHECK(effect_size(1.0, 5) == doctest::Approx(1.0));
}

TEST_CASE("effect_size rejects bad arguments") {
  CHECK_THROWS_AS(effect_size(0.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(effect_size(-0.1, 2), std::invalid_argument);
  CHECK_THROWS_AS(effect_size(1.1, 2), std::invalid_argument);
}

TEST_CASE("effect_size maps chance to 0.5 and is monotone in p_obs") {
  for (int kappa : {2, 3, 4, 7, 20}) {
    CHECK(effect_size(1.0 / kappa, kappa) == doctest::Approx(0.5).epsilon(1e-12));
    double prev = -1.0;
    for (double p = 0.0; p <= 1.0; p += 0.01) {
      const double pi = effect_size(p, kappa);
      CHECK(pi >= 0.0);
      CHECK(pi <= 1.0);
      CHECK(pi > prev);
      prev = pi;
    }
  }
}

TEST_CASE("standard_error worked values") {
  CHECK(standard_error(0.5, 0.5, 10000) == doctest::Approx(0.005).epsilon(1e-12));
  CHECK(standard_error(0.5, 0.5, 4) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("standard_error decreases with N and rejects degenerates") {
  double prev = 1e300;
  for (std::int64_t n : {10, 100, 1000, 10000, 100000}) {
    const double se = standard_error(0.5, 0.5, n);
    CHECK(se < prev);
    prev = se;
  }
  CHECK_THROWS_AS(standard_error(0.0, 0.5, 100), std::invalid_argument);
  CHECK_THROWS_AS(standard_error(0.5, 1.0, 100), std::invalid_argument);
  CHECK_THROWS_AS(standard_error(0.5, 0.5, 0), std::invalid_argument);
}

TEST_CASE("standard_error reduces to binomial form when pi = P_obs") {
  // kappa = 2: pi(1-pi)/sqrt(N pi(1-pi)) = sqrt(pi(1-pi)/N)
  for (double p : {0.1, 0.3, 0.5, 0.73}) {
    for (std::int64_t n : {37, 1000, 250000}) {
      CHECK(standard_error(p, p, n) ==
            doctest::Approx(std::sqrt(p * (1.0 - p) / static_cast<double>(n)))
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("z_score worked values and antisymmetry") {
  CHECK(z_score(0.51, 0.005) == doctest::Approx(2.0));
  CHECK(z_score(0.49, 0.005) == doctest::Approx(-2.0));
  CHECK(z_score(0.5, 0.123) == doctest::Approx(0.0));
  CHECK_THROWS_AS(z_score(0.5, 0.0), std::invalid_argument);

  // z(effect_size(p,2), se(...)) antisymmetric under p -> 1-p
  for (double p : {0.51, 0.6, 0.9}) {
    const double zp = z_score(p, standard_error(p, p, 1000));
    const double zm = z_score(1.0 - p, standard_error(1.0 - p, 1.0 - p, 1000));
    CHECK(zp == doctest::Approx(-zm).epsilon(1e-12));
  }
}

TEST_CASE("pi_from_z worked values") {
  CHECK(pi_from_z(0.0, 1000, 0.5) == doctest::Approx(0.5));
  CHECK(pi_from_z(2.0, 10000, 0.5) == doctest::Approx(0.51).epsilon(1e-4));
}

TEST_CASE("pi_from_z inverts the pi -> z composition") {
  SplitMix64 rng(99);
  for (int i = 0; i < 100; ++i) {
    const double pi = 0.05 + 0.9 * rng.next_double();
    const double p_obs = 0.1 + 0.8 * rng.next_double();
    const std::int64_t n = 10 + static_cast<std::int64_t>(rng.next_double() * 100000);
    const double z = z_score(pi, standard_error(pi, p_obs, n));
    const double back = pi_from_z(z, n, p_obs);
    CHECK(back == doctest::Approx(pi).epsilon(1e-9));
  }
}

TEST_CASE("summarize basics") {
  StudyRecord a{"a", 1000, 0.4, 2, Condition::Treatment, 1990, {}};
  StudyRecord b{"b", 1000, 0.6, 2, Condition::Treatment, 1991, {}};
  std::vector<StudyRecord> pair{a, b};
  const auto s = summarize(pair);
  CHECK(s.count == 2);
  CHECK(s.mean_pi == doctest::Approx(0.5));

  std::vector<StudyRecord> one{{"x", 500, 0.51, 2, Condition::Control, 2000, {}}};
  const auto s1 = summarize(one);
  CHECK(s1.count == 1);
  CHECK(s1.mean_pi == doctest::Approx(0.51));
  CHECK(std::isnan(s1.mean_se));

  CHECK_THROWS_AS(summarize(std::span<const StudyRecord>{}), std::invalid_argument);
}

TEST_CASE("summarize of simulated chance records lands near 0.5") {
  std::vector<StudyRecord> records;
  for (int i = 0; i < 380; ++i) {
    StudyRecord r;
    r.study_id = "r" + std::to_string(i);
    r.n_bits = 1000;
    r.p_obs = simulate_proportion({0.5, 0.5}, r.n_bits, 5000 + i);
    records.push_back(r);
  }
  const auto s = summarize(records);
  CHECK(std::abs(s.mean_pi - 0.5) < 3.0 * s.mean_se);
}

TEST_CASE("summarize chance mean within 4 se for nearly all seeds") {
  int ok = 0;
  const int n_seeds = 50;
  for (int seed = 0; seed < n_seeds; ++seed) {
    std::vector<StudyRecord> records;
    for (int i = 0; i < 60; ++i) {
      StudyRecord r;
      r.study_id = "r" + std::to_string(i);
      r.n_bits = 400;
      r.p_obs = simulate_proportion({0.5, 0.5}, r.n_bits,
                                    static_cast<std::uint64_t>(seed) * 1000 + i);
      records.push_back(r);
    }
    const auto s = summarize(records);
    if (std::abs(s.mean_pi - 0.5) < 4.0 * s.mean_se) ++ok;
  }
  CHECK(ok >= static_cast<int>(0.98 * n_seeds));
}

TEST_CASE("merge_and_average reports both combination rules") {
  DatabaseSummary a{380, 0.510, 0.002, {}};
  DatabaseSummary b{137, 0.495, 0.001, {}};
  const auto m = merge_and_average(a, b);
  CHECK(m.mean_simple == doctest::Approx(0.5025));
  CHECK(m.mean_pooled ==
        doctest::Approx((380.0 * 0.510 + 137.0 * 0.495) / 517.0).epsilon(1e-12));
  CHECK(m.count == 517);
  CHECK(m.se == doctest::Approx(0.002).epsilon(0.3));  // Table-1 order of magnitude

  const auto same = merge_and_average(a, a);
  CHECK(same.mean_simple == doctest::Approx(a.mean_pi));
  CHECK(same.mean_pooled == doctest::Approx(a.mean_pi));
}

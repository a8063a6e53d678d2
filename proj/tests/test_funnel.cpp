#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "funnelrs/dataio.hpp"
#include "funnelrs/funnel.hpp"
#include "funnelrs/markov.hpp"

using namespace funnelrs;

namespace {

std::vector<StudyRecord> synth(double p, std::uint64_t seed, std::size_t n = 380,
                               std::optional<CensorRule> censor = {}) {
  SynthSpec spec;
  spec.n_studies = n;
  spec.params = {p, p};
  spec.seed = seed;
  spec.censoring = censor;
  return synthesize(spec);
}

}  // namespace

TEST_CASE("envelope_pi worked values") {
  EnvelopeSpec spec{1.96, 1.0, 0.5};
  auto [lo, hi] = envelope_pi(spec, 10000);
  CHECK(hi == doctest::Approx(0.5098).epsilon(1e-6));
  CHECK(lo == doctest::Approx(0.4902).epsilon(1e-6));

  auto [lo_big, hi_big] = envelope_pi(spec, 1000000000);
  CHECK(hi_big == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(lo_big == doctest::Approx(0.5).epsilon(1e-4));

  EnvelopeSpec fitted{1.96, 2.21, 0.5};
  auto [flo, fhi] = envelope_pi(fitted, 10000);
  CHECK(fhi - 0.5 == doctest::Approx(0.02166).epsilon(1e-3));
  // broadening by V acts like raising z0 from 1.96 to 4.33
  CHECK(1.96 * 2.21 == doctest::Approx(4.33).epsilon(1e-3));

  // clamped at small N
  auto [clo, chi] = envelope_pi(spec, 1);
  CHECK(clo == 0.0);
  CHECK(chi == 1.0);
}

TEST_CASE("envelope_n worked values") {
  EnvelopeSpec spec{1.96, 1.0, 0.5};
  CHECK(envelope_n(spec, 0.51) == doctest::Approx(9604.0).epsilon(1e-9));
  CHECK_THROWS_AS(envelope_n(spec, 0.5), std::invalid_argument);

  EnvelopeSpec fitted{1.96, 2.21, 0.5};
  CHECK(envelope_n(fitted, 0.51) ==
        doctest::Approx(2.21 * 2.21 * 9604.0).epsilon(1e-9));
}

TEST_CASE("envelope_pi and envelope_n are inverse wherever unclamped") {
  for (double v : {0.4, 1.0, 2.21}) {
    for (double z0 : {1.0, 1.96, 3.0}) {
      EnvelopeSpec spec{z0, v, 0.5};
      for (std::int64_t n : {500, 9604, 100000, 5000000}) {
        const auto [lo, hi] = envelope_pi(spec, n);
        if (hi < 1.0) {
          CHECK(envelope_n(spec, hi) == doctest::Approx(static_cast<double>(n)).epsilon(1e-9));
          CHECK(envelope_n(spec, lo) == doctest::Approx(static_cast<double>(n)).epsilon(1e-9));
        }
      }
    }
  }
}

TEST_CASE("envelope width scales linearly in V and z0 and as 1/sqrt(N)") {
  auto half_width = [](double z0, double v, std::int64_t n) {
    EnvelopeSpec spec{z0, v, 0.5, 1, 10000000};
    const auto [lo, hi] = envelope_pi(spec, n);
    return hi - 0.5;
  };
  const double base = half_width(1.0, 1.0, 1000000);
  for (double v : {0.5, 2.0, 3.7}) CHECK(half_width(1.0, v, 1000000) == doctest::Approx(v * base));
  for (double z : {0.5, 2.0, 3.7}) CHECK(half_width(z, 1.0, 1000000) == doctest::Approx(z * base));
  CHECK(half_width(1.0, 1.0, 250000) == doctest::Approx(2.0 * base));
}

TEST_CASE("coverage basics") {
  EnvelopeSpec spec{1.96, 1.0, 0.5};
  std::vector<StudyRecord> center{{"c", 50, 0.5, 2, Condition::Treatment, 2000, {}}};
  const auto rep = coverage(center, spec);
  CHECK(rep.n_total == 1);
  CHECK(rep.n_inside == 1);
  CHECK(rep.fraction_inside == doctest::Approx(1.0));
  CHECK_THROWS_AS(coverage(std::span<const StudyRecord>{}, spec), std::invalid_argument);
}

TEST_CASE("chance records are ~95% inside the V=1 envelope") {
  const auto records = synth(0.5, 31);
  const auto rep = coverage(records, EnvelopeSpec{1.96, 1.0, 0.5});
  CHECK(rep.fraction_inside == doctest::Approx(0.95).epsilon(0.05 / 0.95));
  CHECK(rep.n_inside + rep.n_on_or_outside == rep.n_total);
}

TEST_CASE("persistent records spill far outside the V=1 envelope") {
  const auto records = synth(0.83, 32);
  const auto rep = coverage(records, EnvelopeSpec{1.96, 1.0, 0.5});
  CHECK(rep.fraction_inside < 0.80);
}

TEST_CASE("fit_variance_factor recovers the truth") {
  const auto chance = synth(0.5, 33);
  CHECK(fit_variance_factor(chance, 1.96, 0.95) == doctest::Approx(1.0).epsilon(0.1));

  std::vector<StudyRecord> flat;
  for (int i = 0; i < 25; ++i)
    flat.push_back({"f" + std::to_string(i), 1000, 0.5, 2, Condition::Treatment, 2000, {}});
  CHECK(fit_variance_factor(flat, 1.96, 0.95) == doctest::Approx(0.05));

  CHECK_THROWS_AS(fit_variance_factor(std::span<const StudyRecord>(flat.data(), 5), 1.96, 0.95),
                  std::invalid_argument);
}

TEST_CASE("fit_variance_factor is monotone in target coverage") {
  const auto records = synth(0.83, 34);
  double prev = 0.0;
  for (double target : {0.5, 0.8, 0.9, 0.95, 0.99}) {
    const double v = fit_variance_factor(records, 1.96, target);
    CHECK(v >= prev - 1e-3);
    prev = v;
  }
}

TEST_CASE("wp_estimate") {
  const auto chance = synth(0.5, 35);
  CHECK(wp_estimate(chance) == doctest::Approx(0.5).epsilon(0.01 / 0.5));

  std::vector<StudyRecord> exact;
  for (int i = 0; i < 50; ++i)
    exact.push_back({"e" + std::to_string(i), 1000000 + i, 0.5, 2, Condition::Treatment, 2000, {}});
  CHECK(wp_estimate(exact) == doctest::Approx(0.5));

  SynthSpec asym;
  asym.params = {0.88, 0.5};
  asym.seed = 36;
  const auto skewed = synthesize(asym);
  CHECK(wp_estimate(skewed) == doctest::Approx(0.807).epsilon(0.01 / 0.807));

  std::vector<StudyRecord> few(exact.begin(), exact.begin() + 3);
  CHECK_THROWS_AS(wp_estimate(few), std::invalid_argument);
}

TEST_CASE("asymmetry quadrants and imbalance") {
  std::vector<StudyRecord> records;
  records.push_back({"a", 100, 0.6, 2, Condition::Treatment, 2000, {}});
  records.push_back({"b", 200, 0.7, 2, Condition::Treatment, 2000, {}});
  records.push_back({"c", 2000000, 0.4, 2, Condition::Treatment, 2000, {}});
  const auto rep = asymmetry(records, 0.5, 100000);
  CHECK(rep.above_small == 2);
  CHECK(rep.below_small == 0);
  CHECK(rep.below_large == 1);
  CHECK(rep.above_small + rep.below_small + rep.above_large + rep.below_large == 3);
  CHECK(rep.imbalance == doctest::Approx(1.0));
}

TEST_CASE("chance database is roughly balanced") {
  const auto records = synth(0.5, 37);
  const auto rep = asymmetry(records, 0.5, 100000);
  CHECK(std::abs(rep.imbalance) < 0.15);
}

TEST_CASE("censoring below wp inflates the plain mean") {
  // drop sub-0.5 small studies: the one-sided void of selective reporting
  const auto censored = synth(0.5, 38, 380, CensorRule{0.0, 0.5, 100000});
  const auto rep = asymmetry(censored, 0.5, 100000);
  CHECK(rep.imbalance > 0.5);
  const auto s = summarize(censored);
  CHECK(s.mean_pi > 0.5);
  CHECK(wp_estimate(censored) == doctest::Approx(0.5).epsilon(0.02 / 0.5));
}

TEST_CASE("censoring always moves the mean in the uncensored direction") {
  int moved = 0;
  for (std::uint64_t seed = 60; seed < 70; ++seed) {
    const auto censored = synth(0.5, seed, 120, CensorRule{0.0, 0.5, 100000});
    if (summarize(censored).mean_pi > 0.5) ++moved;
  }
  CHECK(moved == 10);
}

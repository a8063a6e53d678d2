#include "funnelrs/funnel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace funnelrs {

std::pair<double, double> envelope_pi(const EnvelopeSpec& spec, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("envelope_pi: n must be >= 1");
  const double half = spec.z0 * std::sqrt(spec.wp * (1.0 - spec.wp) / static_cast<double>(n)) *
                      spec.v_factor;
  const double lo = std::max(0.0, spec.wp - half);
  const double hi = std::min(1.0, spec.wp + half);
  return {lo, hi};
}

double envelope_n(const EnvelopeSpec& spec, double pi) {
  const double d = pi - spec.wp;
  if (d == 0.0) throw std::invalid_argument("envelope_n: pi equals wp (infinite N)");
  return spec.z0 * spec.z0 * spec.v_factor * spec.v_factor * spec.wp * (1.0 - spec.wp) /
         (d * d);
}

CoverageReport coverage(std::span<const StudyRecord> records, const EnvelopeSpec& spec) {
  if (records.empty()) throw std::invalid_argument("coverage: empty record collection");
  CoverageReport rep;
  rep.n_total = records.size();
  rep.inside.reserve(records.size());
  for (const auto& r : records) {
    const double pi = effect_size(r.p_obs, r.kappa);
    const auto [lo, hi] = envelope_pi(spec, r.n_bits);
    const bool in = pi > lo && pi < hi;  // boundary counts as not-inside
    rep.inside.push_back(in);
    if (in)
      ++rep.n_inside;
    else
      ++rep.n_on_or_outside;
  }
  rep.fraction_inside =
      static_cast<double>(rep.n_inside) / static_cast<double>(rep.n_total);
  return rep;
}

double fit_variance_factor(std::span<const StudyRecord> records, double z0,
                           double target_coverage, double wp) {
  if (records.size() < 20)
    throw std::invalid_argument("fit_variance_factor: need at least 20 records");
  if (!(target_coverage > 0.0 && target_coverage < 1.0))
    throw std::invalid_argument("fit_variance_factor: target_coverage must lie in (0,1)");

  auto frac_inside = [&](double v) {
    EnvelopeSpec spec{z0, v, wp};
    return coverage(records, spec).fraction_inside;
  };

  double lo = 0.05, hi = 20.0;
  if (frac_inside(hi) < target_coverage)
    throw std::domain_error("fit_variance_factor: target coverage unreachable at V = 20");
  if (frac_inside(lo) >= target_coverage) return lo;  // degenerate, zero scatter
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    if (frac_inside(mid) >= target_coverage)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

double wp_estimate(std::span<const StudyRecord> records, double large_n_quantile) {
  if (!(large_n_quantile > 0.0 && large_n_quantile <= 1.0))
    throw std::invalid_argument("wp_estimate: quantile must lie in (0,1]");
  std::vector<const StudyRecord*> sorted;
  sorted.reserve(records.size());
  for (const auto& r : records) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](const StudyRecord* a, const StudyRecord* b) { return a->n_bits > b->n_bits; });

  std::size_t take = static_cast<std::size_t>(
      std::ceil(large_n_quantile * static_cast<double>(records.size())));
  take = std::max<std::size_t>(take, 5);
  if (take > records.size())
    throw std::invalid_argument("wp_estimate: fewer than 5 records above the size quantile");

  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < take; ++i) {
    const double w = static_cast<double>(sorted[i]->n_bits);
    num += w * effect_size(sorted[i]->p_obs, sorted[i]->kappa);
    den += w;
  }
  return num / den;
}

AsymmetryReport asymmetry(std::span<const StudyRecord> records, double wp,
                          std::int64_t n_threshold) {
  if (records.empty()) throw std::invalid_argument("asymmetry: empty record collection");
  AsymmetryReport rep;
  for (const auto& r : records) {
    const double pi = effect_size(r.p_obs, r.kappa);
    const bool small = r.n_bits < n_threshold;
    const bool above = pi >= wp;
    if (small)
      (above ? rep.above_small : rep.below_small)++;
    else
      (above ? rep.above_large : rep.below_large)++;
  }
  const double a = static_cast<double>(rep.above_small);
  const double b = static_cast<double>(rep.below_small);
  rep.imbalance = (a + b) > 0.0 ? (a - b) / (a + b) : 0.0;
  return rep;
}

}  // namespace funnelrs

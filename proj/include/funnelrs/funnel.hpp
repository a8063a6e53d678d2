#ifndef FUNNELRS_FUNNEL_HPP
#define FUNNELRS_FUNNEL_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "funnelrs/domain.hpp"

namespace funnelrs {

/// Confidence envelope pi = wp +- z0 * sqrt(wp(1-wp)/N) * V.
/// v_factor = 1 is the envelope of serially independent data.
struct EnvelopeSpec {
  double z0 = 1.96;
  double v_factor = 1.0;
  double wp = 0.5;
  std::int64_t n_min = 100;
  std::int64_t n_max = 1000000;
};

struct CoverageReport {
  std::size_t n_total = 0;
  std::size_t n_inside = 0;
  std::size_t n_on_or_outside = 0;
  double fraction_inside = 0.0;
  std::vector<bool> inside;  // per record, input order
};

/// Quadrant census of the funnel: (pi above/below wp) x (N below/at-least
/// the size threshold). `imbalance` is (above-below)/(above+below) over the
/// small-N records; +1 means every small study sits above wp.
struct AsymmetryReport {
  std::size_t above_small = 0;
  std::size_t below_small = 0;
  std::size_t above_large = 0;
  std::size_t below_large = 0;
  double imbalance = 0.0;
};

/// Envelope bounds at size n, clamped to [0, 1].
std::pair<double, double> envelope_pi(const EnvelopeSpec& spec, std::int64_t n);

/// Size at which the envelope passes through pi:
/// N = z0^2 V^2 wp(1-wp) / (pi - wp)^2. Rejects pi == wp.
double envelope_n(const EnvelopeSpec& spec, double pi);

/// Classifies each record strictly inside vs on-or-outside the envelope
/// evaluated at its own N.
CoverageReport coverage(std::span<const StudyRecord> records, const EnvelopeSpec& spec);

/// Smallest V whose envelope at z0 covers at least target_coverage of the
/// records; bisection on [0.05, 20] to 1e-3 absolute. The center wp must be
/// supplied by the caller (0.5 for symmetric sources, or wp_estimate).
double fit_variance_factor(std::span<const StudyRecord> records, double z0,
                           double target_coverage, double wp = 0.5);

/// Size-weighted mean effect size over the records in the top
/// large_n_quantile of sizes; numeric stand-in for reading the funnel's
/// convergence point off the plot. Requires >= 5 qualifying records.
double wp_estimate(std::span<const StudyRecord> records, double large_n_quantile = 0.10);

AsymmetryReport asymmetry(std::span<const StudyRecord> records, double wp,
                          std::int64_t n_threshold);

}  // namespace funnelrs

#endif

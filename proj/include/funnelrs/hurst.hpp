#ifndef FUNNELRS_HURST_HPP
#define FUNNELRS_HURST_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "funnelrs/domain.hpp"

namespace funnelrs {

struct RsPoint {
  std::int64_t window_n;
  double rs_mean;
};

struct HurstReport {
  double h = 0.0;
  double h_se = 0.0;   // OLS slope standard error
  double c_h = 0.0;    // 2^(2H-1) - 1
  double r_squared = 0.0;
  std::vector<RsPoint> points;
};

struct ShuffleBaseline {
  double mean_h;
  double se_h;  // standard error of the mean over shuffles
  std::vector<double> h_values;
};

/// Cumulative departure from the series mean, X(t) = sum_{i<=t}(x_i - xbar).
/// The last element is zero up to rounding.
std::vector<double> rescale(std::span<const double> series);

/// (max X - min X) / S with S the population standard deviation of the
/// window. Returns nullopt for a zero-variance window.
std::optional<double> rs_statistic(std::span<const double> window);

/// Window sizes log-spaced by factor 2 from min_window up to length/2.
std::vector<std::int64_t> default_windows(std::size_t length, std::int64_t min_window = 8);

/// Averages R/S over non-overlapping windows per size and regresses
/// log2(R/S) on log2(n). Needs at least 3 usable window sizes.
HurstReport hurst(std::span<const double> series, std::span<const std::int64_t> windows);

HurstReport hurst(std::span<const double> series);

/// Past/future increment correlation 2^(2H-1) - 1, defined on 0 < h < 1.
double c_h(double h);

/// Fisher-Yates shuffles the series n_shuffles times (shuffle i uses the
/// derived seed base + i), estimates H for each, and returns the mean and
/// its standard error. Shuffling destroys ordering-induced persistence.
ShuffleBaseline randomized_baseline(std::span<const double> series, int n_shuffles,
                                    std::uint64_t seed);

/// Serial reference for randomized_baseline; identical output required.
ShuffleBaseline randomized_baseline_serial(std::span<const double> series, int n_shuffles,
                                           std::uint64_t seed);

/// Exact fractional Gaussian noise by circulant embedding of the fGn
/// autocovariance gamma(k) = ((k+1)^2H - 2 k^2H + |k-1|^2H) / 2.
/// length must be a power of two.
std::vector<double> generate_fgn(double h_true, std::size_t length, std::uint64_t seed);

/// i.i.d. standard Gaussian series (the H ~ 0.5 reference marginal).
std::vector<double> generate_gaussian(std::size_t length, std::uint64_t seed);

/// Orders records by (pub_year, pub_month, study_id) and returns their
/// effect sizes as a series. Records missing the month sort after dated
/// ones within the same year.
std::vector<double> series_from_records(std::span<const StudyRecord> records);

}  // namespace funnelrs

#endif

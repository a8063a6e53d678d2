#include "funnelrs/hurst.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "funnelrs/rng.hpp"

namespace funnelrs {

std::vector<double> rescale(std::span<const double> series) {
  if (series.size() < 2) throw std::invalid_argument("rescale: need at least 2 values");
  const double mean =
      std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(series.size());
  std::vector<double> x(series.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    acc += series[i] - mean;
    x[i] = acc;
  }
  return x;
}

std::optional<double> rs_statistic(std::span<const double> window) {
  if (window.size() < 2)
    throw std::invalid_argument("rs_statistic: window must have at least 2 values");
  const double mean =
      std::accumulate(window.begin(), window.end(), 0.0) / static_cast<double>(window.size());
  double acc = 0.0, ss = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : window) {
    const double d = v - mean;
    acc += d;
    lo = std::min(lo, acc);
    hi = std::max(hi, acc);
    ss += d * d;
  }
  // population standard deviation
  const double s = std::sqrt(ss / static_cast<double>(window.size()));
  if (s == 0.0) return std::nullopt;
  return (hi - lo) / s;
}

std::vector<std::int64_t> default_windows(std::size_t length, std::int64_t min_window) {
  std::vector<std::int64_t> out;
  for (std::int64_t n = min_window; n <= static_cast<std::int64_t>(length) / 2; n *= 2)
    out.push_back(n);
  return out;
}

HurstReport hurst(std::span<const double> series, std::span<const std::int64_t> windows) {
  if (windows.size() < 3)
    throw std::invalid_argument("hurst: need at least 3 window sizes");
  const std::int64_t len = static_cast<std::int64_t>(series.size());
  for (auto w : windows) {
    if (w < 2) throw std::invalid_argument("hurst: window sizes must be >= 2");
    if (len < 2 * w)
      throw std::invalid_argument("hurst: series shorter than twice the largest window");
  }

  HurstReport rep;
  std::vector<double> lx, ly;
  for (auto w : windows) {
    const std::int64_t n_win = len / w;
    double sum = 0.0;
    std::int64_t used = 0;
    for (std::int64_t i = 0; i < n_win; ++i) {
      auto rs = rs_statistic(series.subspan(static_cast<std::size_t>(i * w),
                                            static_cast<std::size_t>(w)));
      if (rs) {
        sum += *rs;
        ++used;
      }
    }
    if (used == 0) continue;  // all windows degenerate at this size
    const double mean_rs = sum / static_cast<double>(used);
    rep.points.push_back({w, mean_rs});
    lx.push_back(std::log2(static_cast<double>(w)));
    ly.push_back(std::log2(mean_rs));
  }
  if (lx.size() < 3)
    throw std::domain_error("hurst: fewer than 3 usable window sizes");

  const std::size_t m = lx.size();
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(m);
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  rep.h = sxy / sxx;
  double sse = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double resid = (ly[i] - my) - rep.h * (lx[i] - mx);
    sse += resid * resid;
  }
  rep.h_se = std::sqrt(sse / static_cast<double>(m - 2) / sxx);
  rep.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  rep.c_h = c_h(std::clamp(rep.h, 1e-9, 1.0 - 1e-9));
  return rep;
}

HurstReport hurst(std::span<const double> series) {
  const auto w = default_windows(series.size());
  return hurst(series, w);
}

double c_h(double h) {
  if (!(h > 0.0 && h < 1.0)) throw std::invalid_argument("c_h: h must lie in (0,1)");
  return std::exp2(2.0 * h - 1.0) - 1.0;
}

namespace {

std::vector<double> fisher_yates_shuffle(std::span<const double> series,
                                         std::uint64_t seed) {
  std::vector<double> out(series.begin(), series.end());
  SplitMix64 rng(seed);
  for (std::size_t i = out.size() - 1; i > 0; --i) {
    // unbiased bounded draw by rejection
    const std::uint64_t bound = static_cast<std::uint64_t>(i) + 1;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t r;
    do {
      r = rng.next_u64();
    } while (r >= limit);
    std::swap(out[i], out[static_cast<std::size_t>(r % bound)]);
  }
  return out;
}

template <bool Parallel>
ShuffleBaseline run_baseline(std::span<const double> series, int n_shuffles,
                             std::uint64_t seed) {
  if (n_shuffles < 2)
    throw std::invalid_argument("randomized_baseline: need at least 2 shuffles");
  ShuffleBaseline base;
  base.h_values.resize(static_cast<std::size_t>(n_shuffles));

#pragma omp parallel for schedule(dynamic) if (Parallel)
  for (int i = 0; i < n_shuffles; ++i) {
    const auto shuffled =
        fisher_yates_shuffle(series, seed + static_cast<std::uint64_t>(i));
    base.h_values[static_cast<std::size_t>(i)] = hurst(shuffled).h;
  }

  const double n = static_cast<double>(n_shuffles);
  base.mean_h =
      std::accumulate(base.h_values.begin(), base.h_values.end(), 0.0) / n;
  double ss = 0.0;
  for (double h : base.h_values) ss += (h - base.mean_h) * (h - base.mean_h);
  base.se_h = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return base;
}

}  // namespace

ShuffleBaseline randomized_baseline(std::span<const double> series, int n_shuffles,
                                    std::uint64_t seed) {
  return run_baseline<true>(series, n_shuffles, seed);
}

ShuffleBaseline randomized_baseline_serial(std::span<const double> series, int n_shuffles,
                                           std::uint64_t seed) {
  return run_baseline<false>(series, n_shuffles, seed);
}

namespace {

double fgn_autocov(double h, double k) {
  const double th = 2.0 * h;
  return 0.5 * (std::pow(k + 1.0, th) - 2.0 * std::pow(k, th) +
                std::pow(std::abs(k - 1.0), th));
}

}  // namespace

std::vector<double> generate_fgn(double h_true, std::size_t length, std::uint64_t seed) {
  if (!(h_true > 0.0 && h_true < 1.0))
    throw std::invalid_argument("generate_fgn: h_true must lie in (0,1)");
  if (length < 2 || (length & (length - 1)) != 0)
    throw std::invalid_argument("generate_fgn: length must be a power of two >= 2");

  // Davies-Harte: embed the autocovariance in a circulant of size m = 2n,
  // doubling the embedding until all eigenvalues are non-negative.
  std::size_t n_embed = length;
  std::vector<double> eig;
  for (int attempt = 0; attempt < 6; ++attempt) {
    const std::size_t m = 2 * n_embed;
    std::vector<std::complex<double>> c(m);
    for (std::size_t k = 0; k <= n_embed; ++k) {
      c[k] = fgn_autocov(h_true, static_cast<double>(k));
      if (k > 0 && k < n_embed) c[m - k] = c[k];
    }
    std::vector<std::complex<double>> lambda(m);
    fftw_plan plan = fftw_plan_dft_1d(
        static_cast<int>(m), reinterpret_cast<fftw_complex*>(c.data()),
        reinterpret_cast<fftw_complex*>(lambda.data()), FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    double min_eig = 0.0;
    eig.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      eig[k] = lambda[k].real();
      min_eig = std::min(min_eig, eig[k]);
    }
    if (min_eig >= -1e-10) {
      for (auto& e : eig) e = std::max(e, 0.0);
      break;
    }
    eig.clear();
    n_embed *= 2;
  }
  if (eig.empty())
    throw std::domain_error("generate_fgn: circulant embedding not positive definite");

  const std::size_t m = eig.size();
  SplitMix64 rng(seed);
  std::vector<std::complex<double>> w(m);
  const double inv_m = 1.0 / static_cast<double>(m);
  w[0] = std::sqrt(eig[0] * inv_m) * rng.next_gaussian();
  w[m / 2] = std::sqrt(eig[m / 2] * inv_m) * rng.next_gaussian();
  for (std::size_t k = 1; k < m / 2; ++k) {
    const double a = rng.next_gaussian();
    const double b = rng.next_gaussian();
    const double scale = std::sqrt(0.5 * eig[k] * inv_m);
    w[k] = {scale * a, scale * b};
    w[m - k] = std::conj(w[k]);
  }

  std::vector<std::complex<double>> x(m);
  fftw_plan plan = fftw_plan_dft_1d(
      static_cast<int>(m), reinterpret_cast<fftw_complex*>(w.data()),
      reinterpret_cast<fftw_complex*>(x.data()), FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  std::vector<double> out(length);
  for (std::size_t i = 0; i < length; ++i) out[i] = x[i].real();
  return out;
}

std::vector<double> generate_gaussian(std::size_t length, std::uint64_t seed) {
  std::vector<double> out(length);
  SplitMix64 rng(seed);
  for (auto& v : out) v = rng.next_gaussian();
  return out;
}

std::vector<double> series_from_records(std::span<const StudyRecord> records) {
  std::vector<const StudyRecord*> sorted;
  sorted.reserve(records.size());
  for (const auto& r : records) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](const StudyRecord* a, const StudyRecord* b) {
    if (a->pub_year != b->pub_year) return a->pub_year < b->pub_year;
    const int ma = a->pub_month.value_or(13);  // undated records sort last in year
    const int mb = b->pub_month.value_or(13);
    if (ma != mb) return ma < mb;
    return a->study_id < b->study_id;
  });
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto* r : sorted) out.push_back(effect_size(r->p_obs, r->kappa));
  return out;
}

}  // namespace funnelrs

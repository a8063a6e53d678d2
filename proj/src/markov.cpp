#include "funnelrs/markov.hpp"

#include <cmath>
#include <stdexcept>

#include "funnelrs/rng.hpp"

namespace funnelrs {

namespace {

void validate(MarkovParams p) {
  if (!(p.p11 >= 0.0 && p.p11 <= 1.0 && p.p00 >= 0.0 && p.p00 <= 1.0))
    throw std::invalid_argument("markov: transition probabilities must lie in [0,1]");
  if (p.p11 + p.p00 >= 2.0)
    throw std::invalid_argument("markov: absorbing chain (p11 + p00 = 2) rejected");
}

}  // namespace

double MarkovTheory::sigma0(std::int64_t n) const {
  if (n < 1) throw std::invalid_argument("sigma0: n must be >= 1");
  return std::sqrt(wp * (1.0 - wp) / static_cast<double>(n));
}

MarkovTheory theory(MarkovParams params) {
  validate(params);
  const double s = params.p11 + params.p00;
  MarkovTheory t;
  t.wp = (1.0 - params.p00) / (2.0 - s);
  t.v_factor = std::sqrt(s / (2.0 - s));
  t.c1 = s - 1.0;
  return t;
}

double self_transition_from_v(double v_factor) {
  if (!(v_factor > 0.0))
    throw std::invalid_argument("self_transition_from_v: v_factor must be positive");
  const double v2 = v_factor * v_factor;
  return v2 / (v2 + 1.0);
}

double correlation_at_distance(double p, int k) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("correlation_at_distance: p must lie in [0,1]");
  if (k < 1) throw std::invalid_argument("correlation_at_distance: k must be >= 1");
  return std::pow(2.0 * p - 1.0, k);
}

BitSequence generate(MarkovParams params, std::int64_t n_bits, std::uint64_t seed) {
  validate(params);
  if (n_bits < 1) throw std::invalid_argument("generate: n_bits must be >= 1");
  const MarkovTheory t = theory(params);

  BitSequence seq;
  seq.seed = seed;
  seq.params = params;
  seq.bits.resize(static_cast<std::size_t>(n_bits));

  SplitMix64 rng(seed);
  std::uint8_t state = rng.next_double() < t.wp ? 1 : 0;
  seq.bits[0] = state;
  for (std::int64_t i = 1; i < n_bits; ++i) {
    const double stay = state ? params.p11 : params.p00;
    if (rng.next_double() >= stay) state ^= 1;
    seq.bits[static_cast<std::size_t>(i)] = state;
  }
  return seq;
}

double simulate_proportion(MarkovParams params, std::int64_t n_bits, std::uint64_t seed) {
  validate(params);
  if (n_bits < 1) throw std::invalid_argument("simulate_proportion: n_bits must be >= 1");
  const MarkovTheory t = theory(params);

  SplitMix64 rng(seed);
  std::uint8_t state = rng.next_double() < t.wp ? 1 : 0;
  std::int64_t ones = state;
  for (std::int64_t i = 1; i < n_bits; ++i) {
    const double stay = state ? params.p11 : params.p00;
    if (rng.next_double() >= stay) state ^= 1;
    ones += state;
  }
  return static_cast<double>(ones) / static_cast<double>(n_bits);
}

double empirical_correlation(const BitSequence& seq, std::int64_t k) {
  const std::int64_t n = static_cast<std::int64_t>(seq.bits.size());
  if (k < 1) throw std::invalid_argument("empirical_correlation: k must be >= 1");
  if (k >= n - 1)
    throw std::invalid_argument("empirical_correlation: k must be < length - 1");

  double mean = 0.0;
  for (auto b : seq.bits) mean += b;
  mean /= static_cast<double>(n);

  double var = 0.0;
  for (auto b : seq.bits) {
    const double d = b - mean;
    var += d * d;
  }
  if (var == 0.0)
    throw std::domain_error("empirical_correlation: constant bit sequence");

  double cov = 0.0;
  for (std::int64_t i = 0; i + k < n; ++i) {
    cov += (seq.bits[static_cast<std::size_t>(i)] - mean) *
           (seq.bits[static_cast<std::size_t>(i + k)] - mean);
  }
  return cov / var;
}

double product_correlation(const BitSequence& seq, std::int64_t k) {
  const std::int64_t n = static_cast<std::int64_t>(seq.bits.size());
  if (k < 1 || k >= n - 1)
    throw std::invalid_argument("product_correlation: invalid lag");
  std::int64_t both = 0;
  for (std::int64_t i = 0; i + k < n; ++i) {
    both += seq.bits[static_cast<std::size_t>(i)] &
            seq.bits[static_cast<std::size_t>(i + k)];
  }
  return static_cast<double>(both) / static_cast<double>(n - k);
}

namespace {

template <bool Parallel>
std::vector<FunnelPoint> run_funnel(MarkovParams params,
                                    std::span<const std::int64_t> sizes,
                                    int replications, std::uint64_t seed) {
  validate(params);
  if (replications < 1)
    throw std::invalid_argument("funnel_simulation: replications must be >= 1");
  for (auto n : sizes)
    if (n < 1) throw std::invalid_argument("funnel_simulation: sizes must be >= 1");

  const std::int64_t total =
      static_cast<std::int64_t>(sizes.size()) * replications;
  std::vector<FunnelPoint> out(static_cast<std::size_t>(total));

#pragma omp parallel for schedule(dynamic) if (Parallel)
  for (std::int64_t idx = 0; idx < total; ++idx) {
    const std::int64_t s = idx / replications;
    const int r = static_cast<int>(idx % replications);
    const std::int64_t n = sizes[static_cast<std::size_t>(s)];
    out[static_cast<std::size_t>(idx)] = FunnelPoint{
        n, r, simulate_proportion(params, n, seed + static_cast<std::uint64_t>(idx))};
  }
  return out;
}

}  // namespace

std::vector<FunnelPoint> funnel_simulation(MarkovParams params,
                                           std::span<const std::int64_t> sizes,
                                           int replications, std::uint64_t seed) {
  return run_funnel<true>(params, sizes, replications, seed);
}

std::vector<FunnelPoint> funnel_simulation_serial(MarkovParams params,
                                                  std::span<const std::int64_t> sizes,
                                                  int replications, std::uint64_t seed) {
  return run_funnel<false>(params, sizes, replications, seed);
}

std::vector<double> batch_means(std::span<const std::uint8_t> bits,
                                std::int64_t batch_size) {
  if (batch_size < 1) throw std::invalid_argument("batch_means: batch_size must be >= 1");
  if (batch_size > static_cast<std::int64_t>(bits.size()))
    throw std::invalid_argument("batch_means: batch_size exceeds sequence length");
  const std::size_t n_batches = bits.size() / static_cast<std::size_t>(batch_size);
  std::vector<double> means(n_batches);
  for (std::size_t b = 0; b < n_batches; ++b) {
    std::int64_t ones = 0;
    const std::size_t off = b * static_cast<std::size_t>(batch_size);
    for (std::int64_t i = 0; i < batch_size; ++i)
      ones += bits[off + static_cast<std::size_t>(i)];
    means[b] = static_cast<double>(ones) / static_cast<double>(batch_size);
  }
  return means;
}

}  // namespace funnelrs

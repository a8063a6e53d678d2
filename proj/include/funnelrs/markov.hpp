#ifndef FUNNELRS_MARKOV_HPP
#define FUNNELRS_MARKOV_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace funnelrs {

/// Two-state chain given by its self-transition probabilities.
/// p11 + p00 = 2 is an absorbing chain and is rejected everywhere.
struct MarkovParams {
  double p11;
  double p00;
};

/// Closed-form stationary statistics of a two-state chain:
///   wp       = (1 - p00) / (2 - (p11 + p00))         stationary mean
///   v_factor = sqrt((p11 + p00) / (2 - (p11 + p00))) variance broadening
///   c1       = p11 + p00 - 1                          lag-1 correlation
/// For p11 = p00 = p these reduce to wp = 0.5, V = sqrt(p/(1-p)), c1 = 2p-1.
struct MarkovTheory {
  double wp;
  double v_factor;
  double c1;

  /// Binomial standard deviation of the proportion of 1s in n bits,
  /// before broadening: sqrt(wp(1-wp)/n).
  double sigma0(std::int64_t n) const;
};

struct BitSequence {
  std::vector<std::uint8_t> bits;
  std::uint64_t seed;
  MarkovParams params;
};

struct FunnelPoint {
  std::int64_t n;
  int replication;
  double proportion;
};

MarkovTheory theory(MarkovParams params);

/// Inverse of the symmetric-case variance factor: p = V^2 / (V^2 + 1).
double self_transition_from_v(double v_factor);

/// k-step correlation of the symmetric chain, (2p-1)^k.
double correlation_at_distance(double p, int k);

/// Simulates n_bits steps; the first bit is drawn from the stationary
/// distribution so no burn-in is needed. Deterministic per seed.
BitSequence generate(MarkovParams params, std::int64_t n_bits, std::uint64_t seed);

/// Same chain, but only accumulates the proportion of 1s (no storage).
double simulate_proportion(MarkovParams params, std::int64_t n_bits, std::uint64_t seed);

/// Lag-k Pearson autocorrelation of the bit series. Throws on constant input.
double empirical_correlation(const BitSequence& seq, std::int64_t k);

/// Product-form estimator mean(b_n * b_{n+k}); secondary diagnostic only.
double product_correlation(const BitSequence& seq, std::int64_t k);

/// For each size N, simulates `replications` independent chains and records
/// each proportion of 1s. Replication r of size index s uses the derived
/// seed base + s*replications + r, so results do not depend on thread count.
std::vector<FunnelPoint> funnel_simulation(MarkovParams params,
                                           std::span<const std::int64_t> sizes,
                                           int replications, std::uint64_t seed);

/// Serial reference for funnel_simulation; must produce identical output.
std::vector<FunnelPoint> funnel_simulation_serial(MarkovParams params,
                                                  std::span<const std::int64_t> sizes,
                                                  int replications, std::uint64_t seed);

/// Means of consecutive non-overlapping batches; a trailing partial batch
/// is dropped so every mean averages exactly batch_size bits.
std::vector<double> batch_means(std::span<const std::uint8_t> bits, std::int64_t batch_size);

}  // namespace funnelrs

#endif

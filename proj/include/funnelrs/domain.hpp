#ifndef FUNNELRS_DOMAIN_HPP
#define FUNNELRS_DOMAIN_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace funnelrs {

enum class Condition { Treatment, Control, Calibration };

std::string to_string(Condition c);
Condition condition_from_string(const std::string& s);

/// One binary-outcome experiment: N trials with kappa alternatives,
/// observed hit proportion p_obs, dated for time-series ordering.
struct StudyRecord {
  std::string study_id;
  std::int64_t n_bits = 0;
  double p_obs = 0.0;
  int kappa = 2;
  Condition condition = Condition::Treatment;
  int pub_year = 0;
  std::optional<int> pub_month;
};

struct EffectSummary {
  double pi;
  double se;
  double z;
};

struct DatabaseSummary {
  std::size_t count = 0;
  double mean_pi = 0.0;
  double mean_se = 0.0;  // standard error of mean_pi (sample sd / sqrt(count)); NaN for count == 1
  std::optional<double> wp_estimate;
};

/// Result of combining two database summaries. `mean_simple` averages the
/// two means with equal weight; `mean_pooled` weights by study count.
/// `se` assumes both inputs sample the same underlying population.
struct MergeResult {
  double mean_simple;
  double mean_pooled;
  std::size_t count;
  double se;
};

/// Effect size pi = P_obs(kappa-1) / (1 + P_obs(kappa-2)); identity for kappa = 2.
/// Maps the chance rate 1/kappa to 0.5 for every kappa.
double effect_size(double p_obs, int kappa);

/// se_pi = pi(1-pi) / sqrt(N * P_obs(1-P_obs)). Degenerate proportions
/// (0 or 1) are rejected, the quotient is undefined there.
double standard_error(double pi, double p_obs, std::int64_t n_bits);

double z_score(double pi, double se);

/// Inverse of pi -> z_score(pi, standard_error(pi, p_obs_assumed, n_bits)):
/// solves the quadratic z*pi^2 + (s - z)*pi - s/2 = 0, s = sqrt(N*P(1-P)),
/// and returns the root in (0, 1).
double pi_from_z(double z, std::int64_t n_bits, double p_obs_assumed);

EffectSummary effect_summary(const StudyRecord& record);

DatabaseSummary summarize(std::span<const StudyRecord> records);

MergeResult merge_and_average(const DatabaseSummary& a, const DatabaseSummary& b);

}  // namespace funnelrs

#endif

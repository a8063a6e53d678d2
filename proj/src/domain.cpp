#include "funnelrs/domain.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace funnelrs {

std::string to_string(Condition c) {
  switch (c) {
    case Condition::Treatment: return "treatment";
    case Condition::Control: return "control";
    case Condition::Calibration: return "calibration";
  }
  throw std::logic_error("invalid condition");
}

Condition condition_from_string(const std::string& s) {
  if (s == "treatment") return Condition::Treatment;
  if (s == "control") return Condition::Control;
  if (s == "calibration") return Condition::Calibration;
  throw std::invalid_argument("unknown condition: " + s);
}

double effect_size(double p_obs, int kappa) {
  if (kappa < 2) throw std::invalid_argument("effect_size: kappa must be >= 2");
  if (!(p_obs >= 0.0 && p_obs <= 1.0))
    throw std::invalid_argument("effect_size: p_obs must lie in [0,1]");
  if (kappa == 2) return p_obs;
  return p_obs * (kappa - 1) / (1.0 + p_obs * (kappa - 2));
}

double standard_error(double pi, double p_obs, std::int64_t n_bits) {
  if (n_bits < 1) throw std::invalid_argument("standard_error: n_bits must be >= 1");
  if (!(pi > 0.0 && pi < 1.0))
    throw std::invalid_argument("standard_error: pi must lie strictly in (0,1)");
  if (!(p_obs > 0.0 && p_obs < 1.0))
    throw std::invalid_argument("standard_error: p_obs must lie strictly in (0,1)");
  return pi * (1.0 - pi) / std::sqrt(static_cast<double>(n_bits) * p_obs * (1.0 - p_obs));
}

double z_score(double pi, double se) {
  if (!(se > 0.0)) throw std::invalid_argument("z_score: se must be positive");
  return (pi - 0.5) / se;
}

double pi_from_z(double z, std::int64_t n_bits, double p_obs_assumed) {
  if (n_bits < 1) throw std::invalid_argument("pi_from_z: n_bits must be >= 1");
  if (!(p_obs_assumed > 0.0 && p_obs_assumed < 1.0))
    throw std::invalid_argument("pi_from_z: p_obs_assumed must lie strictly in (0,1)");
  const double s =
      std::sqrt(static_cast<double>(n_bits) * p_obs_assumed * (1.0 - p_obs_assumed));
  if (z == 0.0) return 0.5;
  // (pi - 0.5) s = z pi (1 - pi)  =>  z pi^2 + (s - z) pi - s/2 = 0
  const double a = z;
  const double b = s - z;
  const double c = -0.5 * s;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) throw std::domain_error("pi_from_z: no real solution");
  const double sq = std::sqrt(disc);
  // stable quadratic: compute the larger-magnitude root first
  const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
  const double r1 = q / a;
  const double r2 = c / q;
  for (double r : {r1, r2}) {
    if (r > 0.0 && r < 1.0 && (r - 0.5) * z >= 0.0) return r;
  }
  throw std::domain_error("pi_from_z: solution falls outside (0,1)");
}

EffectSummary effect_summary(const StudyRecord& record) {
  EffectSummary s;
  s.pi = effect_size(record.p_obs, record.kappa);
  s.se = standard_error(s.pi, record.p_obs, record.n_bits);
  s.z = z_score(s.pi, s.se);
  return s;
}

DatabaseSummary summarize(std::span<const StudyRecord> records) {
  if (records.empty()) throw std::invalid_argument("summarize: empty record collection");
  double sum = 0.0;
  for (const auto& r : records) sum += effect_size(r.p_obs, r.kappa);
  const double mean = sum / static_cast<double>(records.size());

  DatabaseSummary out;
  out.count = records.size();
  out.mean_pi = mean;
  if (records.size() >= 2) {
    double ss = 0.0;
    for (const auto& r : records) {
      const double d = effect_size(r.p_obs, r.kappa) - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(records.size() - 1));
    out.mean_se = sd / std::sqrt(static_cast<double>(records.size()));
  } else {
    out.mean_se = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

MergeResult merge_and_average(const DatabaseSummary& a, const DatabaseSummary& b) {
  if (a.count == 0 || b.count == 0)
    throw std::invalid_argument("merge_and_average: both summaries must be non-empty");
  MergeResult m;
  m.mean_simple = 0.5 * (a.mean_pi + b.mean_pi);
  const double na = static_cast<double>(a.count);
  const double nb = static_cast<double>(b.count);
  m.mean_pooled = (na * a.mean_pi + nb * b.mean_pi) / (na + nb);
  m.count = a.count + b.count;
  // same-population assumption: each se_i estimates sigma/sqrt(n_i), so pool
  // the implied sigma^2 estimates with count weights.
  const double sigma2 =
      (na * (na * a.mean_se * a.mean_se) + nb * (nb * b.mean_se * b.mean_se)) / (na + nb);
  m.se = std::sqrt(sigma2 / (na + nb));
  return m;
}

}  // namespace funnelrs

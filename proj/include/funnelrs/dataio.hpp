#ifndef FUNNELRS_DATAIO_HPP
#define FUNNELRS_DATAIO_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "funnelrs/domain.hpp"
#include "funnelrs/funnel.hpp"
#include "funnelrs/hurst.hpp"
#include "funnelrs/markov.hpp"

namespace funnelrs {

/// Thrown for malformed input; carries the 1-based row number when the
/// failure is tied to a specific CSV row.
struct ParseError : std::runtime_error {
  ParseError(std::string msg, std::size_t row = 0)
      : std::runtime_error(std::move(msg)), row(row) {}
  std::size_t row;
};

/// Drop records with effect size in [pi_lo, pi_hi] and N below n_below —
/// the funnel-plot footprint of selective non-reporting.
struct CensorRule {
  double pi_lo;
  double pi_hi;
  std::int64_t n_below;
};

struct SynthSpec {
  std::size_t n_studies = 380;
  std::int64_t n_min = 100;       // log-uniform study-size bounds
  std::int64_t n_max = 1000000;
  MarkovParams params{0.5, 0.5};
  std::optional<CensorRule> censoring;
  std::uint64_t seed = 0;
  Condition condition = Condition::Treatment;
  int first_year = 1969;          // publication dates assigned in record order
  int last_year = 2004;
};

// ---- records CSV ----
// Header: study_id,condition,pub_year,pub_month,n_bits,kappa,p_obs,pi,z
// Exactly one of p_obs/pi/z populated per row; the others are derived.

std::vector<StudyRecord> read_records(std::istream& in);
std::vector<StudyRecord> read_records_file(const std::string& path);

/// full_precision writes max_digits10 so read_records round-trips exactly;
/// otherwise 6 significant digits.
void write_records(std::ostream& out, std::span<const StudyRecord> records,
                   bool full_precision = false);

/// Simulates each study's bits through the Markov chain (study i uses the
/// derived seed base + 1 + i; the size draw uses base itself), then applies
/// the optional censoring rule. Errors if censoring removes every record.
std::vector<StudyRecord> synthesize(const SynthSpec& spec);

// ---- report serialization (JSON carries schema_version = 1) ----

std::string coverage_to_json(const CoverageReport& report);
std::string asymmetry_to_json(const AsymmetryReport& report);
std::string hurst_to_json(const HurstReport& report,
                          const std::optional<ShuffleBaseline>& baseline);
std::string theory_to_json(MarkovParams params, const MarkovTheory& theory);
std::string summary_to_json(const DatabaseSummary& summary);

/// CSV "N,pi,condition,inside_flag", one row per record in input order.
void write_funnel_csv(std::ostream& out, std::span<const StudyRecord> records,
                      const CoverageReport& cov);

/// CSV "window_n,rs_mean".
void write_rs_csv(std::ostream& out, std::span<const RsPoint> points);

/// CSV "N,replication,proportion".
void write_funnel_points_csv(std::ostream& out, std::span<const FunnelPoint> points);

/// One character '0'/'1' per line.
void write_bits_text(std::ostream& out, std::span<const std::uint8_t> bits);
std::vector<std::uint8_t> read_bits_text(std::istream& in);

/// Packed 8 bits/byte, first bit in the most significant position; a
/// trailing partial byte is zero-padded (consumer needs the bit count).
void write_bits_packed(std::ostream& out, std::span<const std::uint8_t> bits);

/// Whitespace-separated reals, for `hurst` on plain series input.
std::vector<double> read_series(std::istream& in);

}  // namespace funnelrs

#endif

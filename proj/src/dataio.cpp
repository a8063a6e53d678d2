#include "funnelrs/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "funnelrs/rng.hpp"

namespace funnelrs {

namespace {

using json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

std::string fmt_num(double v, int sig_digits) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*g", sig_digits, v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& col, std::size_t row) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ParseError("row " + std::to_string(row) + ", column '" + col +
                         "': not a number: '" + s + "'",
                     row);
  }
}

std::int64_t parse_int(const std::string& s, const std::string& col, std::size_t row) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ParseError("row " + std::to_string(row) + ", column '" + col +
                         "': not an integer: '" + s + "'",
                     row);
  }
}

const std::vector<std::string> kHeader = {"study_id", "condition", "pub_year",
                                          "pub_month", "n_bits",    "kappa",
                                          "p_obs",    "pi",         "z"};

}  // namespace

std::vector<StudyRecord> read_records(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty input: missing header row");
  if (split_csv_line(line) != kHeader)
    throw ParseError(
        "bad header: expected study_id,condition,pub_year,pub_month,n_bits,kappa,p_obs,pi,z");

  std::vector<StudyRecord> records;
  std::set<std::string> seen_ids;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != kHeader.size())
      throw ParseError("row " + std::to_string(row) + ": expected " +
                           std::to_string(kHeader.size()) + " columns, got " +
                           std::to_string(f.size()),
                       row);

    StudyRecord r;
    r.study_id = f[0];
    if (r.study_id.empty())
      throw ParseError("row " + std::to_string(row) + ": empty study_id", row);
    if (!seen_ids.insert(r.study_id).second)
      throw ParseError("row " + std::to_string(row) + ": duplicate study_id '" +
                           r.study_id + "'",
                       row);
    try {
      r.condition = condition_from_string(f[1]);
    } catch (const std::invalid_argument& e) {
      throw ParseError("row " + std::to_string(row) + ", column 'condition': " + e.what(),
                       row);
    }
    r.pub_year = static_cast<int>(parse_int(f[2], "pub_year", row));
    if (!f[3].empty()) {
      const int m = static_cast<int>(parse_int(f[3], "pub_month", row));
      if (m < 1 || m > 12)
        throw ParseError("row " + std::to_string(row) + ": pub_month must be 1-12", row);
      r.pub_month = m;
    }
    r.n_bits = parse_int(f[4], "n_bits", row);
    if (r.n_bits < 1)
      throw ParseError("row " + std::to_string(row) + ": n_bits must be >= 1", row);
    r.kappa = static_cast<int>(parse_int(f[5], "kappa", row));
    if (r.kappa < 2)
      throw ParseError("row " + std::to_string(row) + ": kappa must be >= 2", row);

    const int populated = (!f[6].empty()) + (!f[7].empty()) + (!f[8].empty());
    if (populated != 1)
      throw ParseError("row " + std::to_string(row) +
                           ": exactly one of p_obs/pi/z must be populated",
                       row);

    try {
      if (!f[6].empty()) {
        r.p_obs = parse_double(f[6], "p_obs", row);
        if (!(r.p_obs >= 0.0 && r.p_obs <= 1.0))
          throw ParseError("row " + std::to_string(row) + ": p_obs outside [0,1]", row);
        effect_size(r.p_obs, r.kappa);  // validates
      } else if (!f[7].empty()) {
        const double pi = parse_double(f[7], "pi", row);
        if (!(pi >= 0.0 && pi <= 1.0))
          throw ParseError("row " + std::to_string(row) + ": pi outside [0,1]", row);
        // invert equation (1): P_obs = pi / (kappa - 1 - pi(kappa - 2))
        r.p_obs = pi / (r.kappa - 1 - pi * (r.kappa - 2));
      } else {
        const double z = parse_double(f[8], "z", row);
        const double pi = pi_from_z(z, r.n_bits, 0.5);
        r.p_obs = pi / (r.kappa - 1 - pi * (r.kappa - 2));
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError("row " + std::to_string(row) + ": " + e.what(), row);
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<StudyRecord> read_records_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_records(in);
}

void write_records(std::ostream& out, std::span<const StudyRecord> records,
                   bool full_precision) {
  const int digits = full_precision ? 17 : 6;
  out << "study_id,condition,pub_year,pub_month,n_bits,kappa,p_obs,pi,z\n";
  for (const auto& r : records) {
    out << r.study_id << ',' << to_string(r.condition) << ',' << r.pub_year << ',';
    if (r.pub_month) out << *r.pub_month;
    out << ',' << r.n_bits << ',' << r.kappa << ',' << fmt_num(r.p_obs, digits)
        << ",,\n";
  }
}

std::vector<StudyRecord> synthesize(const SynthSpec& spec) {
  if (spec.n_studies == 0) throw std::invalid_argument("synthesize: n_studies must be >= 1");
  if (spec.n_min < 1 || spec.n_max < spec.n_min)
    throw std::invalid_argument("synthesize: invalid size bounds");
  if (spec.censoring && !(spec.censoring->pi_lo <= spec.censoring->pi_hi &&
                          spec.censoring->pi_lo >= 0.0 && spec.censoring->pi_hi <= 1.0))
    throw std::invalid_argument("synthesize: censoring band must be a sub-interval of [0,1]");

  // size draws come from the base stream, bit simulation from derived streams
  SplitMix64 size_rng(spec.seed);
  const double log_lo = std::log(static_cast<double>(spec.n_min));
  const double log_hi = std::log(static_cast<double>(spec.n_max));
  std::vector<std::int64_t> sizes(spec.n_studies);
  for (auto& n : sizes) {
    const double u = size_rng.next_double();
    n = std::clamp(static_cast<std::int64_t>(std::exp(log_lo + u * (log_hi - log_lo))),
                   spec.n_min, spec.n_max);
  }

  std::vector<double> props(spec.n_studies);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(spec.n_studies); ++i) {
    props[static_cast<std::size_t>(i)] =
        simulate_proportion(spec.params, sizes[static_cast<std::size_t>(i)],
                            spec.seed + 1 + static_cast<std::uint64_t>(i));
  }

  const int n_years = spec.last_year - spec.first_year + 1;
  std::vector<StudyRecord> records;
  records.reserve(spec.n_studies);
  for (std::size_t i = 0; i < spec.n_studies; ++i) {
    StudyRecord r;
    char id[16];
    std::snprintf(id, sizeof(id), "S%05zu", i + 1);
    r.study_id = id;
    r.n_bits = sizes[i];
    r.p_obs = props[i];
    r.kappa = 2;
    r.condition = spec.condition;
    r.pub_year = spec.first_year +
                 static_cast<int>(i * static_cast<std::size_t>(n_years) / spec.n_studies);
    r.pub_month = static_cast<int>(i % 12) + 1;

    if (spec.censoring) {
      const double pi = effect_size(r.p_obs, r.kappa);
      if (pi >= spec.censoring->pi_lo && pi <= spec.censoring->pi_hi &&
          r.n_bits < spec.censoring->n_below)
        continue;
    }
    records.push_back(std::move(r));
  }
  if (records.empty())
    throw std::domain_error("synthesize: censoring removed every record");
  return records;
}

std::string coverage_to_json(const CoverageReport& report) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["n_total"] = report.n_total;
  j["n_inside"] = report.n_inside;
  j["n_on_or_outside"] = report.n_on_or_outside;
  j["fraction_inside"] = report.fraction_inside;
  return j.dump(2);
}

std::string asymmetry_to_json(const AsymmetryReport& report) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["above_small"] = report.above_small;
  j["below_small"] = report.below_small;
  j["above_large"] = report.above_large;
  j["below_large"] = report.below_large;
  j["imbalance"] = report.imbalance;
  return j.dump(2);
}

std::string hurst_to_json(const HurstReport& report,
                          const std::optional<ShuffleBaseline>& baseline) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["h"] = report.h;
  j["h_se"] = report.h_se;
  j["c_h"] = report.c_h;
  j["r_squared"] = report.r_squared;
  j["points"] = json::array();
  for (const auto& p : report.points)
    j["points"].push_back({{"window_n", p.window_n}, {"rs_mean", p.rs_mean}});
  if (baseline) {
    j["shuffle_baseline"] = {{"mean_h", baseline->mean_h},
                             {"se_h", baseline->se_h},
                             {"h_values", baseline->h_values}};
  }
  return j.dump(2);
}

std::string theory_to_json(MarkovParams params, const MarkovTheory& theory) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["p11"] = params.p11;
  j["p00"] = params.p00;
  j["wp"] = theory.wp;
  j["v_factor"] = theory.v_factor;
  j["c1"] = theory.c1;
  return j.dump(2);
}

std::string summary_to_json(const DatabaseSummary& summary) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["count"] = summary.count;
  j["mean_pi"] = summary.mean_pi;
  if (std::isnan(summary.mean_se))
    j["mean_se"] = nullptr;
  else
    j["mean_se"] = summary.mean_se;
  if (summary.wp_estimate) j["wp_estimate"] = *summary.wp_estimate;
  return j.dump(2);
}

void write_funnel_csv(std::ostream& out, std::span<const StudyRecord> records,
                      const CoverageReport& cov) {
  if (records.size() != cov.inside.size())
    throw std::invalid_argument("write_funnel_csv: coverage does not match records");
  out << "N,pi,condition,inside_flag\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    out << records[i].n_bits << ','
        << fmt_num(effect_size(records[i].p_obs, records[i].kappa), 6) << ','
        << to_string(records[i].condition) << ',' << (cov.inside[i] ? 1 : 0) << '\n';
  }
}

void write_rs_csv(std::ostream& out, std::span<const RsPoint> points) {
  out << "window_n,rs_mean\n";
  for (const auto& p : points) out << p.window_n << ',' << fmt_num(p.rs_mean, 6) << '\n';
}

void write_funnel_points_csv(std::ostream& out, std::span<const FunnelPoint> points) {
  out << "N,replication,proportion\n";
  for (const auto& p : points)
    out << p.n << ',' << p.replication << ',' << fmt_num(p.proportion, 6) << '\n';
}

void write_bits_text(std::ostream& out, std::span<const std::uint8_t> bits) {
  for (auto b : bits) out << (b ? '1' : '0') << '\n';
}

std::vector<std::uint8_t> read_bits_text(std::istream& in) {
  std::vector<std::uint8_t> bits;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line != "0" && line != "1")
      throw ParseError("row " + std::to_string(row) + ": expected 0 or 1", row);
    bits.push_back(line == "1" ? 1 : 0);
  }
  return bits;
}

void write_bits_packed(std::ostream& out, std::span<const std::uint8_t> bits) {
  std::uint8_t byte = 0;
  int filled = 0;
  for (auto b : bits) {
    byte = static_cast<std::uint8_t>((byte << 1) | (b & 1));
    if (++filled == 8) {
      out.put(static_cast<char>(byte));
      byte = 0;
      filled = 0;
    }
  }
  if (filled > 0) out.put(static_cast<char>(byte << (8 - filled)));
}

std::vector<double> read_series(std::istream& in) {
  std::vector<double> out;
  double v;
  while (in >> v) out.push_back(v);
  if (!in.eof()) throw ParseError("series input: non-numeric token");
  return out;
}

}  // namespace funnelrs

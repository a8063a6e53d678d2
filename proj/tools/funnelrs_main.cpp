// funnelrs: bias and correlation diagnostics for binary-outcome study
// databases. Subcommands: simulate, synth, funnel, hurst, report.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "funnelrs/dataio.hpp"
#include "funnelrs/domain.hpp"
#include "funnelrs/funnel.hpp"
#include "funnelrs/hurst.hpp"
#include "funnelrs/markov.hpp"
#include "funnelrs/svg.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitIo = 3;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_file(const fs::path& path, const std::string& content, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw IoError("write failed: " + path.string());
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> seed) {
  if (seed) return *seed;
  std::random_device rd;
  const std::uint64_t s =
      (static_cast<std::uint64_t>(rd()) << 32) | static_cast<std::uint64_t>(rd());
  std::cerr << "seed: " << s << "\n";  // replay handle for unseeded runs
  return s;
}

std::vector<funnelrs::StudyRecord> load_records(const std::string& path) {
  if (path == "-") return funnelrs::read_records(std::cin);
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return funnelrs::read_records(in);
}

// ---- simulate ----

struct SimulateArgs {
  double p11 = 0.5, p00 = 0.5;
  std::int64_t n_bits = 100000;
  std::optional<std::uint64_t> seed;
  std::string out = "sequence";
  std::string bits_format = "text";
};

int run_simulate(const SimulateArgs& a) {
  const funnelrs::MarkovParams params{a.p11, a.p00};
  const auto theory = funnelrs::theory(params);
  const auto seq = funnelrs::generate(params, a.n_bits, resolve_seed(a.seed));

  std::ostringstream bits;
  if (a.bits_format == "packed")
    funnelrs::write_bits_packed(bits, seq.bits);
  else
    funnelrs::write_bits_text(bits, seq.bits);
  write_file(a.out + (a.bits_format == "packed" ? ".bits.bin" : ".bits.txt"), bits.str(),
             a.bits_format == "packed");
  write_file(a.out + ".theory.json", funnelrs::theory_to_json(params, theory) + "\n");
  return kExitOk;
}

// ---- synth ----

struct SynthArgs {
  std::size_t studies = 380;
  double p11 = 0.5, p00 = 0.5;
  std::int64_t n_min = 100, n_max = 1000000;
  std::optional<std::uint64_t> seed;
  std::string condition = "treatment";
  std::optional<double> censor_lo, censor_hi;
  std::int64_t censor_n = 100000;
  std::string out = "records.csv";
};

int run_synth(const SynthArgs& a) {
  funnelrs::SynthSpec spec;
  spec.n_studies = a.studies;
  spec.params = {a.p11, a.p00};
  spec.n_min = a.n_min;
  spec.n_max = a.n_max;
  spec.seed = resolve_seed(a.seed);
  spec.condition = funnelrs::condition_from_string(a.condition);
  if (a.censor_lo && a.censor_hi)
    spec.censoring = funnelrs::CensorRule{*a.censor_lo, *a.censor_hi, a.censor_n};
  else if (a.censor_lo || a.censor_hi)
    throw std::invalid_argument("--censor-lo and --censor-hi must be given together");

  const auto records = funnelrs::synthesize(spec);
  std::ostringstream csv;
  funnelrs::write_records(csv, records, true);
  write_file(a.out, csv.str());
  return kExitOk;
}

// ---- funnel ----

struct FunnelArgs {
  std::string in;
  double z0 = 1.96;
  double target_coverage = 0.95;
  std::optional<double> wp;
  std::int64_t n_threshold = 100000;
  std::string out = "funnel";
};

int run_funnel(const FunnelArgs& a) {
  const auto records = load_records(a.in);
  if (records.empty()) throw std::invalid_argument("no records in input");

  const double wp =
      a.wp ? *a.wp : funnelrs::wp_estimate(records);
  auto summary = funnelrs::summarize(records);
  summary.wp_estimate = wp;

  funnelrs::EnvelopeSpec random_env{a.z0, 1.0, wp};
  const auto cov = funnelrs::coverage(records, random_env);
  const double v_fit =
      funnelrs::fit_variance_factor(records, a.z0, a.target_coverage, wp);
  funnelrs::EnvelopeSpec fitted_env{a.z0, v_fit, wp};
  const auto asym = funnelrs::asymmetry(records, wp, a.n_threshold);

  std::ostringstream csv;
  funnelrs::write_funnel_csv(csv, records, cov);
  write_file(a.out + ".funnel.csv", csv.str());

  funnelrs::FunnelChartOptions opt;
  opt.random_envelope = random_env;
  opt.fitted_envelope = fitted_env;
  opt.wp = wp;
  opt.mean_pi = summary.mean_pi;
  opt.cov = cov;
  write_file(a.out + ".funnel.svg", funnelrs::render_funnel_svg(records, opt));

  json j;
  j["schema_version"] = 1;
  j["summary"] = json::parse(funnelrs::summary_to_json(summary));
  j["coverage_v1"] = json::parse(funnelrs::coverage_to_json(cov));
  j["fitted_v"] = v_fit;
  j["self_transition_p"] = funnelrs::self_transition_from_v(v_fit);
  j["asymmetry"] = json::parse(funnelrs::asymmetry_to_json(asym));
  write_file(a.out + ".diagnostics.json", j.dump(2) + "\n");
  return kExitOk;
}

// ---- hurst ----

struct HurstArgs {
  std::string in;
  bool series_input = false;
  std::int64_t min_window = 8;
  int shuffles = 10;
  std::optional<std::uint64_t> seed;
  std::string out = "hurst";
};

int run_hurst(const HurstArgs& a) {
  std::vector<double> series;
  if (a.series_input) {
    if (a.in == "-") {
      series = funnelrs::read_series(std::cin);
    } else {
      std::ifstream in(a.in);
      if (!in) throw IoError("cannot open " + a.in);
      series = funnelrs::read_series(in);
    }
  } else {
    series = funnelrs::series_from_records(load_records(a.in));
  }

  const auto windows = funnelrs::default_windows(series.size(), a.min_window);
  const auto report = funnelrs::hurst(series, windows);
  const auto baseline =
      funnelrs::randomized_baseline(series, a.shuffles, resolve_seed(a.seed));

  write_file(a.out + ".hurst.json", funnelrs::hurst_to_json(report, baseline) + "\n");
  write_file(a.out + ".rs.svg", funnelrs::render_rs_svg(report));
  std::ostringstream csv;
  funnelrs::write_rs_csv(csv, report.points);
  write_file(a.out + ".rs.csv", csv.str());
  return kExitOk;
}

// ---- report ----

struct ReportArgs {
  std::optional<std::string> in;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "report";
};

// One-shot analysis bundle over a user database or three synthetic ones
// (chance, persistent-Markov, censored-chance). Sections run independently;
// failures are collected and reported at the end.
int run_report(const ReportArgs& a) {
  const std::uint64_t seed = resolve_seed(a.seed);
  std::error_code ec;
  fs::create_directories(a.out_dir, ec);
  if (ec) throw IoError("cannot create " + a.out_dir);
  {
    std::ofstream probe(fs::path(a.out_dir) / ".write_probe");
    if (!probe) throw IoError("output directory not writable: " + a.out_dir);
  }
  fs::remove(fs::path(a.out_dir) / ".write_probe");

  struct Dataset {
    std::string name;
    std::vector<funnelrs::StudyRecord> records;
  };
  std::vector<Dataset> datasets;
  if (a.in) {
    datasets.push_back({"user", load_records(*a.in)});
  } else {
    funnelrs::SynthSpec chance;
    chance.seed = seed;
    datasets.push_back({"chance", funnelrs::synthesize(chance)});

    funnelrs::SynthSpec markov = chance;
    markov.params = {0.83, 0.83};
    markov.seed = seed + 1000000;
    datasets.push_back({"markov_p083", funnelrs::synthesize(markov)});

    funnelrs::SynthSpec censored = chance;
    censored.seed = seed + 2000000;
    censored.censoring = funnelrs::CensorRule{0.0, 0.5, 100000};
    censored.condition = funnelrs::Condition::Control;
    datasets.push_back({"censored_chance", funnelrs::synthesize(censored)});
  }

  json index;
  index["schema_version"] = 1;
  index["seed"] = seed;
  index["files"] = json::array();
  std::vector<std::string> failures;
  auto emit = [&](const std::string& name, const std::string& content, bool bin = false) {
    write_file(fs::path(a.out_dir) / name, content, bin);
    index["files"].push_back(name);
  };

  json tables;
  for (const auto& ds : datasets) {
    try {
      std::ostringstream csv;
      funnelrs::write_records(csv, ds.records, true);
      emit(ds.name + ".records.csv", csv.str());

      const double wp = funnelrs::wp_estimate(ds.records);
      auto summary = funnelrs::summarize(ds.records);
      summary.wp_estimate = wp;
      funnelrs::EnvelopeSpec env{1.96, 1.0, wp};
      const auto cov = funnelrs::coverage(ds.records, env);
      const double v_fit = funnelrs::fit_variance_factor(ds.records, 1.96, 0.95, wp);
      const auto asym = funnelrs::asymmetry(ds.records, wp, 100000);

      funnelrs::FunnelChartOptions opt;
      opt.random_envelope = env;
      opt.fitted_envelope = funnelrs::EnvelopeSpec{1.96, v_fit, wp};
      opt.wp = wp;
      opt.mean_pi = summary.mean_pi;
      opt.cov = cov;
      emit(ds.name + ".funnel.svg", funnelrs::render_funnel_svg(ds.records, opt));

      const auto series = funnelrs::series_from_records(ds.records);
      const auto hrep = funnelrs::hurst(series);
      const auto base = funnelrs::randomized_baseline(series, 10, seed + 42);
      emit(ds.name + ".hurst.json", funnelrs::hurst_to_json(hrep, base) + "\n");
      emit(ds.name + ".rs.svg", funnelrs::render_rs_svg(hrep));

      json t;
      t["summary"] = json::parse(funnelrs::summary_to_json(summary));
      t["fitted_v"] = v_fit;
      t["self_transition_p"] = funnelrs::self_transition_from_v(v_fit);
      t["coverage_v1"] = json::parse(funnelrs::coverage_to_json(cov));
      t["asymmetry"] = json::parse(funnelrs::asymmetry_to_json(asym));
      t["hurst"] = {{"h", hrep.h},
                    {"h_se", hrep.h_se},
                    {"c_h", hrep.c_h},
                    {"shuffled_mean_h", base.mean_h},
                    {"shuffled_se_h", base.se_h}};
      tables[ds.name] = t;
    } catch (const std::exception& e) {
      failures.push_back(ds.name + ": " + e.what());
    }
  }

  if (datasets.size() >= 2 && !a.in) {
    // merged chance + censored summary, the bias-neutralization check
    try {
      const auto sa = funnelrs::summarize(datasets[0].records);
      const auto sb = funnelrs::summarize(datasets[2].records);
      const auto merged = funnelrs::merge_and_average(sa, sb);
      tables["merged_chance_censored"] = {{"mean_simple", merged.mean_simple},
                                          {"mean_pooled", merged.mean_pooled},
                                          {"count", merged.count},
                                          {"se", merged.se}};
    } catch (const std::exception& e) {
      failures.push_back(std::string("merge: ") + e.what());
    }
  }

  emit("tables.json", tables.dump(2) + "\n");
  if (!failures.empty()) index["failures"] = failures;
  write_file(fs::path(a.out_dir) / "index.json", index.dump(2) + "\n");

  if (!failures.empty()) {
    for (const auto& f : failures) std::cerr << "section failed: " << f << "\n";
    return kExitInput;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Funnel-plot and rescaled-range diagnostics for binary-outcome studies"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Generate a two-state Markov bit sequence");
  c_sim->add_option("--p11", sim.p11, "Self-transition probability 1->1")->check(CLI::Range(0.0, 1.0));
  c_sim->add_option("--p00", sim.p00, "Self-transition probability 0->0")->check(CLI::Range(0.0, 1.0));
  c_sim->add_option("--n-bits", sim.n_bits, "Sequence length");
  c_sim->add_option("--seed", sim.seed, "RNG seed (omit for entropy; chosen seed is printed)");
  c_sim->add_option("--out", sim.out, "Output path prefix");
  c_sim->add_option("--bits-format", sim.bits_format, "text or packed")
      ->check(CLI::IsMember({"text", "packed"}));

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Synthesize a study-record database");
  c_synth->add_option("--studies", synth.studies, "Number of studies");
  c_synth->add_option("--p11", synth.p11, "Self-transition probability 1->1")->check(CLI::Range(0.0, 1.0));
  c_synth->add_option("--p00", synth.p00, "Self-transition probability 0->0")->check(CLI::Range(0.0, 1.0));
  c_synth->add_option("--n-min", synth.n_min, "Smallest study size (log-uniform draw)");
  c_synth->add_option("--n-max", synth.n_max, "Largest study size");
  c_synth->add_option("--seed", synth.seed, "RNG seed");
  c_synth->add_option("--condition", synth.condition, "treatment, control or calibration");
  c_synth->add_option("--censor-lo", synth.censor_lo, "Censoring band lower edge");
  c_synth->add_option("--censor-hi", synth.censor_hi, "Censoring band upper edge");
  c_synth->add_option("--censor-n", synth.censor_n, "Censor only studies below this size");
  c_synth->add_option("--out", synth.out, "Output CSV path");

  FunnelArgs fun;
  auto* c_fun = app.add_subcommand("funnel", "Funnel plot, envelopes and coverage diagnostics");
  c_fun->add_option("--in", fun.in, "Records CSV ('-' for stdin)")->required();
  c_fun->add_option("--z0", fun.z0, "Envelope significance multiplier");
  c_fun->add_option("--target-coverage", fun.target_coverage, "Coverage target for the V fit");
  c_fun->add_option("--wp", fun.wp, "Envelope center (default: large-study estimate)");
  c_fun->add_option("--n-threshold", fun.n_threshold, "Small/large split for asymmetry");
  c_fun->add_option("--out", fun.out, "Output path prefix");

  HurstArgs hur;
  auto* c_hur = app.add_subcommand("hurst", "Rescaled-range analysis with shuffle control");
  c_hur->add_option("--in", hur.in, "Records CSV or series file ('-' for stdin)")->required();
  c_hur->add_flag("--series", hur.series_input, "Input is a plain series, one value per token");
  c_hur->add_option("--min-window", hur.min_window, "Smallest R/S window");
  c_hur->add_option("--shuffles", hur.shuffles, "Randomization count");
  c_hur->add_option("--seed", hur.seed, "RNG seed");
  c_hur->add_option("--out", hur.out, "Output path prefix");

  ReportArgs rep;
  auto* c_rep = app.add_subcommand("report", "Full analysis bundle on synthetic or user data");
  c_rep->add_option("--in", rep.in, "Records CSV (omit to analyze built-in synthetic databases)");
  c_rep->add_option("--seed", rep.seed, "RNG seed");
  c_rep->add_option("--out", rep.out_dir, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_sim->parsed()) return run_simulate(sim);
    if (c_synth->parsed()) return run_synth(synth);
    if (c_fun->parsed()) return run_funnel(fun);
    if (c_hur->parsed()) return run_hurst(hur);
    if (c_rep->parsed()) return run_report(rep);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}

#include "funnelrs/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace funnelrs {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 56.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string num_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Scale {
  double lo, hi, px_lo, px_hi;
  double operator()(double v) const {
    return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo);
  }
};

void open_svg(std::ostringstream& s) {
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
    << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
    << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
}

void axis_frame(std::ostringstream& s) {
  s << "<rect x=\"" << num(kMargin) << "\" y=\"" << num(kMargin) << "\" width=\""
    << num(kWidth - 2 * kMargin) << "\" height=\"" << num(kHeight - 2 * kMargin)
    << "\" fill=\"none\" stroke=\"black\"/>\n";
}

void text(std::ostringstream& s, double x, double y, const std::string& t,
          const std::string& anchor = "middle") {
  s << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-size=\"12\" "
    << "font-family=\"sans-serif\" text-anchor=\"" << anchor << "\">" << t << "</text>\n";
}

void envelope_paths(std::ostringstream& s, const EnvelopeSpec& spec, const Scale& xs,
                    const Scale& ys, const std::string& stroke, const std::string& dash) {
  // sample the two envelope branches log-uniformly in N
  const int steps = 64;
  const double la = std::log10(static_cast<double>(spec.n_min));
  const double lb = std::log10(static_cast<double>(spec.n_max));
  for (int branch = 0; branch < 2; ++branch) {
    s << "<polyline fill=\"none\" stroke=\"" << stroke << "\"";
    if (!dash.empty()) s << " stroke-dasharray=\"" << dash << "\"";
    s << " points=\"";
    for (int i = 0; i <= steps; ++i) {
      const double ln = la + (lb - la) * i / steps;
      const auto [lo, hi] =
          envelope_pi(spec, static_cast<std::int64_t>(std::llround(std::pow(10.0, ln))));
      const double pi = branch == 0 ? lo : hi;
      s << num(xs(pi)) << "," << num(ys(ln)) << " ";
    }
    s << "\"/>\n";
  }
}

}  // namespace

std::string render_funnel_svg(std::span<const StudyRecord> records,
                              const FunnelChartOptions& options) {
  if (records.empty()) throw std::invalid_argument("render_funnel_svg: empty dataset");
  if (options.cov && options.cov->inside.size() != records.size())
    throw std::invalid_argument("render_funnel_svg: coverage does not match records");

  double n_lo = 1e300, n_hi = 0.0;
  for (const auto& r : records) {
    n_lo = std::min(n_lo, static_cast<double>(r.n_bits));
    n_hi = std::max(n_hi, static_cast<double>(r.n_bits));
  }
  const double la = std::floor(std::log10(n_lo));
  const double lb = std::ceil(std::log10(n_hi));

  const Scale xs{0.0, 1.0, kMargin, kWidth - kMargin};
  const Scale ys{la, lb, kHeight - kMargin, kMargin};  // large N at the top

  std::ostringstream s;
  open_svg(s);
  if (options.cov) {
    s << "<!-- fraction_inside=" << num_g(options.cov->fraction_inside)
      << " n_total=" << options.cov->n_total << " -->\n";
  }
  axis_frame(s);

  for (double tick = 0.0; tick <= 1.0001; tick += 0.25) {
    text(s, xs(tick), kHeight - kMargin + 18.0, num_g(tick));
  }
  for (double e = la; e <= lb + 0.001; e += 1.0) {
    text(s, kMargin - 8.0, ys(e) + 4.0, "1e" + num_g(e), "end");
  }
  text(s, kWidth / 2.0, kHeight - 12.0, "effect size");
  text(s, kMargin, kMargin - 12.0, "N (bits)", "start");

  EnvelopeSpec rand_env = options.random_envelope;
  rand_env.n_min = static_cast<std::int64_t>(std::pow(10.0, la));
  rand_env.n_max = static_cast<std::int64_t>(std::pow(10.0, lb));
  envelope_paths(s, rand_env, xs, ys, "blue", "6,4");
  if (options.fitted_envelope) {
    EnvelopeSpec fit_env = *options.fitted_envelope;
    fit_env.n_min = rand_env.n_min;
    fit_env.n_max = rand_env.n_max;
    envelope_paths(s, fit_env, xs, ys, "red", "");
  }

  // dashed center line at wp, dash-dotted at the plain mean
  s << "<line x1=\"" << num(xs(options.wp)) << "\" y1=\"" << num(kMargin) << "\" x2=\""
    << num(xs(options.wp)) << "\" y2=\"" << num(kHeight - kMargin)
    << "\" stroke=\"black\" stroke-dasharray=\"8,5\"/>\n";
  if (options.mean_pi) {
    s << "<line x1=\"" << num(xs(*options.mean_pi)) << "\" y1=\"" << num(kMargin)
      << "\" x2=\"" << num(xs(*options.mean_pi)) << "\" y2=\"" << num(kHeight - kMargin)
      << "\" stroke=\"black\" stroke-dasharray=\"10,4,2,4\"/>\n";
  }

  for (std::size_t i = 0; i < records.size(); ++i) {
    const double pi = effect_size(records[i].p_obs, records[i].kappa);
    const double ln = std::log10(static_cast<double>(records[i].n_bits));
    const bool outside = options.cov && !options.cov->inside[i];
    s << "<circle cx=\"" << num(xs(pi)) << "\" cy=\"" << num(ys(ln))
      << "\" r=\"2.5\" fill=\"" << (outside ? "red" : "none")
      << "\" stroke=\"black\"/>\n";
  }

  s << "</svg>\n";
  return s.str();
}

std::string render_rs_svg(const HurstReport& report) {
  if (report.points.empty()) throw std::invalid_argument("render_rs_svg: empty report");

  double lx_lo = 1e300, lx_hi = -1e300, ly_lo = 1e300, ly_hi = -1e300;
  for (const auto& p : report.points) {
    const double lx = std::log2(static_cast<double>(p.window_n));
    const double ly = std::log2(p.rs_mean);
    lx_lo = std::min(lx_lo, lx);
    lx_hi = std::max(lx_hi, lx);
    ly_lo = std::min(ly_lo, ly);
    ly_hi = std::max(ly_hi, ly);
  }
  const double pad = 0.5;
  const Scale xs{lx_lo - pad, lx_hi + pad, kMargin, kWidth - kMargin};
  const Scale ys{ly_lo - pad, ly_hi + pad, kHeight - kMargin, kMargin};

  std::ostringstream s;
  open_svg(s);
  axis_frame(s);
  text(s, kWidth / 2.0, kHeight - 12.0, "log2 window size");
  text(s, kMargin, kMargin - 12.0, "log2 R/S", "start");

  // fitted line through the centroid with slope H
  double mx = 0.0, my = 0.0;
  for (const auto& p : report.points) {
    mx += std::log2(static_cast<double>(p.window_n));
    my += std::log2(p.rs_mean);
  }
  mx /= static_cast<double>(report.points.size());
  my /= static_cast<double>(report.points.size());
  const double x0 = lx_lo - pad, x1 = lx_hi + pad;
  s << "<line x1=\"" << num(xs(x0)) << "\" y1=\"" << num(ys(my + report.h * (x0 - mx)))
    << "\" x2=\"" << num(xs(x1)) << "\" y2=\"" << num(ys(my + report.h * (x1 - mx)))
    << "\" stroke=\"red\"/>\n";

  for (const auto& p : report.points) {
    s << "<circle cx=\"" << num(xs(std::log2(static_cast<double>(p.window_n))))
      << "\" cy=\"" << num(ys(std::log2(p.rs_mean)))
      << "\" r=\"3\" fill=\"none\" stroke=\"black\"/>\n";
  }

  text(s, kWidth - kMargin - 8.0, kMargin + 20.0,
       "H = " + num_g(report.h) + " (se " + num_g(report.h_se) + ")", "end");
  s << "</svg>\n";
  return s.str();
}

std::string render_hurst_vs_length_svg(std::span<const HurstCurve> curves) {
  if (curves.empty()) throw std::invalid_argument("render_hurst_vs_length_svg: no curves");

  double lx_lo = 1e300, lx_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
  for (const auto& c : curves) {
    for (const auto& [len, h] : c.points) {
      lx_lo = std::min(lx_lo, std::log10(len));
      lx_hi = std::max(lx_hi, std::log10(len));
      y_lo = std::min(y_lo, h);
      y_hi = std::max(y_hi, h);
    }
  }
  const Scale xs{lx_lo - 0.2, lx_hi + 0.2, kMargin, kWidth - kMargin};
  const Scale ys{std::min(y_lo, 0.4) - 0.05, std::max(y_hi, 0.8) + 0.05,
                 kHeight - kMargin, kMargin};

  static const char* palette[] = {"black", "red", "blue", "green", "orange"};

  std::ostringstream s;
  open_svg(s);
  axis_frame(s);
  text(s, kWidth / 2.0, kHeight - 12.0, "log10 series length");
  text(s, kMargin, kMargin - 12.0, "H", "start");

  for (std::size_t c = 0; c < curves.size(); ++c) {
    const char* color = palette[c % 5];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    for (const auto& [len, h] : curves[c].points)
      s << num(xs(std::log10(len))) << "," << num(ys(h)) << " ";
    s << "\"/>\n";
    for (const auto& [len, h] : curves[c].points) {
      s << "<circle cx=\"" << num(xs(std::log10(len))) << "\" cy=\"" << num(ys(h))
        << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    text(s, kWidth - kMargin - 8.0, kMargin + 20.0 + 16.0 * static_cast<double>(c),
         curves[c].label + " (" + color + ")", "end");
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace funnelrs

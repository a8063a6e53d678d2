#ifndef FUNNELRS_SVG_HPP
#define FUNNELRS_SVG_HPP

#include <optional>
#include <span>
#include <string>

#include "funnelrs/domain.hpp"
#include "funnelrs/funnel.hpp"
#include "funnelrs/hurst.hpp"

namespace funnelrs {

/// All renderers emit self-contained SVG 1.1 and format every coordinate
/// through the same fixed-precision printer, so identical inputs give
/// byte-identical documents.

struct FunnelChartOptions {
  EnvelopeSpec random_envelope;            // the V = 1 pair
  std::optional<EnvelopeSpec> fitted_envelope;
  double wp = 0.5;                         // dashed center line
  std::optional<double> mean_pi;           // dash-dotted line
  std::optional<CoverageReport> cov;       // marks outside records, metadata
};

/// Effect size horizontal, log10 N vertical (large studies at the top).
std::string render_funnel_svg(std::span<const StudyRecord> records,
                              const FunnelChartOptions& options);

/// log2-log2 R/S points with the fitted regression line and H annotation.
std::string render_rs_svg(const HurstReport& report);

/// H estimates against series length; one polyline per labeled family.
struct HurstCurve {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (length, H)
};
std::string render_hurst_vs_length_svg(std::span<const HurstCurve> curves);

}  // namespace funnelrs

#endif

#pragma once

#include <string>
#include <vector>

namespace cevsim {

/// One point of the relative-error chart.
struct ErrorPlotPoint {
    double delta;
    double err_pct;
    double err_lo_pct;
    double err_hi_pct;
};

/// Self-contained SVG: relative error in percent against log10(delta), with
/// 99% CI whiskers and the zero-error reference line. `manifest_json` is
/// embedded in a <desc> element so the file carries its own provenance.
std::string render_error_plot(const std::vector<ErrorPlotPoint>& points,
                              const std::string& title, const std::string& manifest_json);

void write_error_plot(const std::string& path, const std::vector<ErrorPlotPoint>& points,
                      const std::string& title, const std::string& manifest_json);

}  // namespace cevsim

#include "cevsim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cevsim/format.hpp"

namespace cevsim {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 74.0;
constexpr double kRight = 25.0;
constexpr double kTop = 48.0;
constexpr double kBottom = 58.0;

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (const char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

double nice_step(double span, int target_ticks) {
    const double raw = span / std::max(1, target_ticks);
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    double step = 10.0;
    if (norm <= 1.0) step = 1.0;
    else if (norm <= 2.0) step = 2.0;
    else if (norm <= 5.0) step = 5.0;
    return step * mag;
}

}  // namespace

std::string render_error_plot(const std::vector<ErrorPlotPoint>& points,
                              const std::string& title, const std::string& manifest_json) {
    double x_min = -1.0, x_max = 0.0;
    double y_min = 0.0, y_max = 0.0;
    if (!points.empty()) {
        x_min = x_max = std::log10(points.front().delta);
        for (const auto& pt : points) {
            const double lx = std::log10(pt.delta);
            x_min = std::min(x_min, lx);
            x_max = std::max(x_max, lx);
            y_min = std::min({y_min, pt.err_lo_pct, pt.err_pct});
            y_max = std::max({y_max, pt.err_hi_pct, pt.err_pct});
        }
    }
    const double x_pad = x_max > x_min ? 0.12 * (x_max - x_min) : 0.5;
    x_min -= x_pad;
    x_max += x_pad;
    const double y_span = y_max - y_min;
    const double y_pad = y_span > 0.0 ? 0.12 * y_span : 1.0;
    y_min -= y_pad;
    y_max += y_pad;

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto sx = [&](double lx) { return kLeft + (lx - x_min) / (x_max - x_min) * plot_w; };
    auto sy = [&](double y) { return kTop + (y_max - y) / (y_max - y_min) * plot_h; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    svg << "  <desc>" << xml_escape(manifest_json) << "</desc>\n";
    svg << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "  <text x=\"" << kWidth / 2 << "\" y=\"26\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"15\">"
        << xml_escape(title) << "</text>\n";

    // frame
    svg << "  <rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\""
        << num(plot_w) << "\" height=\"" << num(plot_h)
        << "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";

    // y ticks
    const double step = nice_step(y_max - y_min, 6);
    const double first_tick = std::ceil(y_min / step) * step;
    for (double yt = first_tick; yt <= y_max + 1e-12; yt += step) {
        const double py = sy(yt);
        svg << "  <line x1=\"" << num(kLeft - 4) << "\" y1=\"" << num(py) << "\" x2=\""
            << num(kLeft) << "\" y2=\"" << num(py) << "\" stroke=\"#333\"/>\n";
        char label[32];
        std::snprintf(label, sizeof(label), "%.4g", yt == 0.0 ? 0.0 : yt);
        svg << "  <text x=\"" << num(kLeft - 8) << "\" y=\"" << num(py + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" << label
            << "</text>\n";
    }

    // zero-error reference line
    if (y_min < 0.0 && y_max > 0.0) {
        const double py = sy(0.0);
        svg << "  <line x1=\"" << num(kLeft) << "\" y1=\"" << num(py) << "\" x2=\""
            << num(kLeft + plot_w) << "\" y2=\"" << num(py)
            << "\" stroke=\"#888\" stroke-dasharray=\"5,4\"/>\n";
    }

    // x ticks at the data points
    for (const auto& pt : points) {
        const double px = sx(std::log10(pt.delta));
        svg << "  <line x1=\"" << num(px) << "\" y1=\"" << num(kTop + plot_h) << "\" x2=\""
            << num(px) << "\" y2=\"" << num(kTop + plot_h + 4) << "\" stroke=\"#333\"/>\n";
        char label[32];
        std::snprintf(label, sizeof(label), "%.4g", pt.delta);
        svg << "  <text x=\"" << num(px) << "\" y=\"" << num(kTop + plot_h + 18)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << label
            << "</text>\n";
    }

    // whiskers and markers
    for (const auto& pt : points) {
        const double px = sx(std::log10(pt.delta));
        const double y_lo = sy(pt.err_lo_pct);
        const double y_hi = sy(pt.err_hi_pct);
        svg << "  <line x1=\"" << num(px) << "\" y1=\"" << num(y_lo) << "\" x2=\"" << num(px)
            << "\" y2=\"" << num(y_hi) << "\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n";
        for (const double yc : {y_lo, y_hi}) {
            svg << "  <line x1=\"" << num(px - 5) << "\" y1=\"" << num(yc) << "\" x2=\""
                << num(px + 5) << "\" y2=\"" << num(yc)
                << "\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n";
        }
        svg << "  <circle cx=\"" << num(px) << "\" cy=\"" << num(sy(pt.err_pct))
            << "\" r=\"3.5\" fill=\"#1f77b4\"/>\n";
    }

    // axis labels
    svg << "  <text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"" << num(kHeight - 16)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">step delta "
           "(log scale)</text>\n";
    svg << "  <text x=\"20\" y=\"" << num(kTop + plot_h / 2)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 20 "
        << num(kTop + plot_h / 2) << ")\">relative error [%]</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

void write_error_plot(const std::string& path, const std::vector<ErrorPlotPoint>& points,
                      const std::string& title, const std::string& manifest_json) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    f << render_error_plot(points, title, manifest_json);
    if (!f) throw std::runtime_error("failed writing output file: " + path);
}

}  // namespace cevsim

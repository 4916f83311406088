#pragma once

// SVG 1.1 heatmaps for score / adjacency matrices, with an optional overlay
// that outlines cells where two binary matrices disagree, and simple line
// charts for sweeps and threshold curves.

#include "csv_io.hpp"
#include "metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace mcgc {

struct HeatmapOptions {
    std::string title;
    std::vector<std::string> labels;  // defaults to 0..P-1
    double min_value = 0.0;
    double max_value = 1.0;
    int cell_size = 28;
    std::optional<DifferenceMask> overlay;
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

/// Piecewise-linear viridis approximation, t in [0, 1].
inline std::string color_for(double t) {
    static constexpr std::array<std::array<double, 3>, 5> stops{{{68, 1, 84},
                                                                 {59, 82, 139},
                                                                 {33, 145, 140},
                                                                 {94, 201, 98},
                                                                 {253, 231, 37}}};
    t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0);
    const double pos = t * (stops.size() - 1);
    const auto lo = std::min<std::size_t>(static_cast<std::size_t>(pos), stops.size() - 2);
    const double f = pos - static_cast<double>(lo);
    char buf[8];
    int rgb[3];
    for (int k = 0; k < 3; ++k)
        rgb[k] = static_cast<int>(std::lround(stops[lo][k] + f * (stops[lo + 1][k] - stops[lo][k])));
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
    return buf;
}

}  // namespace detail

inline std::string heatmap_svg(const Matrix& m, const HeatmapOptions& opt = {}) {
    if (!m.allFinite()) throw std::invalid_argument("heatmap matrix must be finite");
    if (opt.overlay && (opt.overlay->rows() != m.rows() || opt.overlay->cols() != m.cols()))
        throw std::invalid_argument("overlay shape does not match matrix");
    const int rows = static_cast<int>(m.rows());
    const int cols = static_cast<int>(m.cols());
    auto label = [&](int k) {
        return k < static_cast<int>(opt.labels.size()) ? opt.labels[static_cast<std::size_t>(k)] : std::to_string(k);
    };
    const int cs = opt.cell_size;
    const int left = 70, top = opt.title.empty() ? 60 : 85;
    const int bar_x = left + cols * cs + 30;
    const int width = bar_x + 80;
    const int height = top + std::max(rows * cs, 200) + 30;
    const double span = opt.max_value - opt.min_value;

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width << "\" height=\"" << height
       << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
       << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    if (!opt.title.empty())
        os << "<text x=\"" << left << "\" y=\"24\" font-size=\"15\">" << detail::xml_escape(opt.title) << "</text>\n";
    os << "<text x=\"" << left << "\" y=\"" << top - 40 << "\">cause (column)</text>\n"
       << "<text x=\"12\" y=\"" << top - 8 << "\">effect</text>\n";

    os << "<g id=\"cells\">\n";
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const double t = span > 0 ? (m(r, c) - opt.min_value) / span : 0.5;
            os << "<rect class=\"cell\" x=\"" << left + c * cs << "\" y=\"" << top + r * cs << "\" width=\"" << cs
               << "\" height=\"" << cs << "\" fill=\"" << detail::color_for(t) << "\"><title>"
               << detail::xml_escape(label(c)) << " -> " << detail::xml_escape(label(r)) << ": "
               << detail::format_real(m(r, c)) << "</title></rect>\n";
        }
    }
    os << "</g>\n";

    if (opt.overlay) {
        os << "<g id=\"overlay\" fill=\"none\" stroke-width=\"3\">\n";
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) {
                const int d = (*opt.overlay)(r, c);
                if (d == static_cast<int>(EdgeDifference::same)) continue;
                const char* stroke = d == static_cast<int>(EdgeDifference::only_in_a) ? "#e41a1c" : "#ff7f00";
                os << "<rect class=\"difference\" x=\"" << left + c * cs + 2 << "\" y=\"" << top + r * cs + 2
                   << "\" width=\"" << cs - 4 << "\" height=\"" << cs - 4 << "\" stroke=\"" << stroke << "\"/>\n";
            }
        os << "</g>\n";
    }

    os << "<g id=\"labels\">\n";
    for (int c = 0; c < cols; ++c)
        os << "<text x=\"" << left + c * cs + cs / 2 << "\" y=\"" << top - 6
           << "\" text-anchor=\"middle\">" << detail::xml_escape(label(c)) << "</text>\n";
    for (int r = 0; r < rows; ++r)
        os << "<text x=\"" << left - 6 << "\" y=\"" << top + r * cs + cs / 2 + 4 << "\" text-anchor=\"end\">"
           << detail::xml_escape(label(r)) << "</text>\n";
    os << "</g>\n";

    const int bar_h = std::max(rows * cs, 200);
    os << "<g id=\"colorbar\">\n";
    constexpr int steps = 50;
    for (int k = 0; k < steps; ++k) {
        const double t = 1.0 - (k + 0.5) / steps;
        os << "<rect x=\"" << bar_x << "\" y=\"" << top + k * bar_h / steps << "\" width=\"16\" height=\""
           << bar_h / steps + 1 << "\" fill=\"" << detail::color_for(t) << "\"/>\n";
    }
    os << "<text x=\"" << bar_x + 22 << "\" y=\"" << top + 10 << "\">" << detail::format_real(opt.max_value)
       << "</text>\n"
       << "<text x=\"" << bar_x + 22 << "\" y=\"" << top + bar_h << "\">" << detail::format_real(opt.min_value)
       << "</text>\n</g>\n</svg>\n";
    return os.str();
}

inline void render_heatmap(const Matrix& m, const std::filesystem::path& path, const HeatmapOptions& opt = {}) {
    write_text_file(path, heatmap_svg(m, opt));
}

struct LineSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> error;  // optional symmetric error bars, same length as y
};

struct LineChartOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::optional<std::pair<double, double>> y_range;  // autoscaled when unset
    int width = 560;
    int height = 380;
};

inline std::string line_chart_svg(const std::vector<LineSeries>& series, const LineChartOptions& opt = {}) {
    static constexpr std::array<const char*, 6> palette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                                        "#17becf"};
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) throw std::invalid_argument("line series x and y differ in length");
        if (!s.error.empty() && s.error.size() != s.y.size())
            throw std::invalid_argument("line series error bars differ in length");
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            const double e = s.error.empty() ? 0.0 : s.error[k];
            if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k]) || !std::isfinite(e))
                throw std::invalid_argument("line series must be finite");
            x0 = std::min(x0, s.x[k]);
            x1 = std::max(x1, s.x[k]);
            y0 = std::min(y0, s.y[k] - e);
            y1 = std::max(y1, s.y[k] + e);
        }
    }
    if (x0 > x1) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (opt.y_range) std::tie(y0, y1) = *opt.y_range;
    if (x1 == x0) x0 -= 0.5, x1 += 0.5;
    if (y1 == y0) y0 -= 0.5, y1 += 0.5;

    const int left = 70, right = 140, top = opt.title.empty() ? 20 : 45, bottom = 50;
    const int pw = opt.width - left - right, ph = opt.height - top - bottom;
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4g", v);
        return std::string(buf);
    };

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << opt.width << "\" height=\""
       << opt.height << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
       << "<rect x=\"0\" y=\"0\" width=\"" << opt.width << "\" height=\"" << opt.height << "\" fill=\"white\"/>\n";
    if (!opt.title.empty())
        os << "<text x=\"" << left << "\" y=\"24\" font-size=\"15\">" << detail::xml_escape(opt.title) << "</text>\n";

    os << "<g id=\"axes\" stroke=\"black\">\n"
       << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph << "\"/>\n"
       << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph << "\"/>\n</g>\n";
    os << "<g id=\"ticks\">\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
        os << "<text x=\"" << px(xv) << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">" << num(xv)
           << "</text>\n<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << num(yv)
           << "</text>\n";
    }
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << opt.height - 12 << "\" text-anchor=\"middle\">"
       << detail::xml_escape(opt.x_label) << "</text>\n"
       << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << top + ph / 2 << ")\">" << detail::xml_escape(opt.y_label) << "</text>\n</g>\n";

    os << "<g id=\"series\" fill=\"none\" stroke-width=\"2\">\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        const char* color = palette[i % palette.size()];
        os << "<polyline class=\"line\" stroke=\"" << color << "\" points=\"";
        for (std::size_t k = 0; k < s.x.size(); ++k) os << (k ? " " : "") << px(s.x[k]) << "," << py(s.y[k]);
        os << "\"/>\n";
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            os << "<circle cx=\"" << px(s.x[k]) << "\" cy=\"" << py(s.y[k]) << "\" r=\"3\" fill=\"" << color
               << "\" stroke=\"none\"/>\n";
            if (!s.error.empty() && s.error[k] > 0)
                os << "<line stroke=\"" << color << "\" stroke-width=\"1\" x1=\"" << px(s.x[k]) << "\" y1=\""
                   << py(s.y[k] - s.error[k]) << "\" x2=\"" << px(s.x[k]) << "\" y2=\"" << py(s.y[k] + s.error[k])
                   << "\"/>\n";
        }
    }
    os << "</g>\n<g id=\"legend\">\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const int ly = top + 10 + static_cast<int>(i) * 18;
        os << "<rect x=\"" << left + pw + 15 << "\" y=\"" << ly - 8 << "\" width=\"12\" height=\"10\" fill=\""
           << palette[i % palette.size()] << "\"/>\n<text x=\"" << left + pw + 32 << "\" y=\"" << ly + 1 << "\">"
           << detail::xml_escape(series[i].name) << "</text>\n";
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

}  // namespace mcgc

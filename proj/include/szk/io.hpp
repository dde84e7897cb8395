// Output primitives: RFC-4180-style CSV with 17-significant-digit floats and
// a minimal self-contained SVG polyline plotter (optionally log-scaled).
#pragma once

#include "common.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

namespace szk {

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string fmt_int(long long v) { return std::to_string(v); }

inline std::string csv_escape(const std::string& field) {
    bool needs = false;
    for (char c : field)
        if (c == ',' || c == '"' || c == '\n' || c == '\r')
            needs = true;
    if (!needs)
        return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline void csv_row(std::ostream& os, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            os << ',';
        os << csv_escape(fields[i]);
    }
    os << "\r\n";
}

// ---- SVG line plots ----

struct SvgSeries {
    std::string label;
    std::vector<std::pair<double, double>> pts;
};

struct SvgAxes {
    std::string x_label, y_label, title;
    bool log_x = false, log_y = false;
};

// one polyline per series on a fixed 840x560 canvas with plain-text tick
// labels; log axes drop nonpositive points
inline void write_svg_plot(std::ostream& os, const std::vector<SvgSeries>& series,
                           const SvgAxes& axes) {
    const double W = 840, H = 560, L = 80, R = 20, T = 40, B = 60;
    auto tx = [&](double v) { return axes.log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return axes.log_y ? std::log10(v) : v; };

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool any = false;
    for (const auto& s : series)
        for (auto [x, y] : s.pts) {
            if ((axes.log_x && x <= 0.0) || (axes.log_y && y <= 0.0))
                continue;
            double X = tx(x), Y = ty(y);
            if (!any) {
                xmin = xmax = X;
                ymin = ymax = Y;
                any = true;
            } else {
                xmin = std::min(xmin, X);
                xmax = std::max(xmax, X);
                ymin = std::min(ymin, Y);
                ymax = std::max(ymax, Y);
            }
        }
    if (!any) {
        xmin = ymin = 0;
        xmax = ymax = 1;
    }
    if (xmax - xmin < 1e-300)
        xmax = xmin + 1;
    if (ymax - ymin < 1e-300)
        ymax = ymin + 1;

    auto px = [&](double X) { return L + (X - xmin) / (xmax - xmin) * (W - L - R); };
    auto py = [&](double Y) { return H - B - (Y - ymin) / (ymax - ymin) * (H - T - B); };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << (H - B) << "\" x2=\"" << (W - R) << "\" y2=\""
       << (H - B) << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << (H - B)
       << "\" stroke=\"black\"/>\n";

    const int nticks = 6;
    for (int i = 0; i <= nticks; ++i) {
        double X = xmin + (xmax - xmin) * i / nticks;
        double Y = ymin + (ymax - ymin) * i / nticks;
        double xpix = px(X), ypix = py(Y);
        os << "<line x1=\"" << xpix << "\" y1=\"" << (H - B) << "\" x2=\"" << xpix << "\" y2=\""
           << (H - B + 5) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << xpix << "\" y=\"" << (H - B + 20)
           << "\" font-size=\"11\" text-anchor=\"middle\">"
           << (axes.log_x ? "1e" + fmt_double(X) : fmt_double(X)).substr(0, 12) << "</text>\n";
        os << "<line x1=\"" << (L - 5) << "\" y1=\"" << ypix << "\" x2=\"" << L << "\" y2=\""
           << ypix << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << (L - 8) << "\" y=\"" << (ypix + 4)
           << "\" font-size=\"11\" text-anchor=\"end\">"
           << (axes.log_y ? "1e" + fmt_double(Y) : fmt_double(Y)).substr(0, 12) << "</text>\n";
    }
    os << "<text x=\"" << (L + (W - L - R) / 2) << "\" y=\"" << (H - 15)
       << "\" font-size=\"13\" text-anchor=\"middle\">" << axes.x_label
       << (axes.log_x ? " (log10)" : "") << "</text>\n";
    os << "<text x=\"18\" y=\"" << (T + (H - T - B) / 2)
       << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
       << (T + (H - T - B) / 2) << ")\">" << axes.y_label << (axes.log_y ? " (log10)" : "")
       << "</text>\n";
    os << "<text x=\"" << (W / 2) << "\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">"
       << axes.title << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const char* col = colors[si % 8];
        os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
        for (auto [x, y] : series[si].pts) {
            if ((axes.log_x && x <= 0.0) || (axes.log_y && y <= 0.0))
                continue;
            os << px(tx(x)) << "," << py(ty(y)) << " ";
        }
        os << "\"/>\n";
        os << "<text x=\"" << (W - R - 6) << "\" y=\"" << (T + 16 + 16 * si)
           << "\" font-size=\"12\" text-anchor=\"end\" fill=\"" << col << "\">"
           << series[si].label << "</text>\n";
    }
    os << "</svg>\n";
}

inline void write_svg_plot_file(const std::string& path, const std::vector<SvgSeries>& series,
                                const SvgAxes& axes) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw invalid_argument_error("cannot open SVG output path: " + path);
    write_svg_plot(f, series, axes);
}

} // namespace szk

#include "mfac/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace mfac {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void include(double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    void pad() {
        if (!std::isfinite(lo) || !std::isfinite(hi)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi - lo < 1e-12) {
            lo -= 1.0;
            hi += 1.0;
        }
        const double margin = 0.05 * (hi - lo);
        lo -= margin;
        hi += margin;
    }
};

}  // namespace

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label,
                           const std::vector<SvgSeries>& series, int width,
                           int height) {
    const double ml = 64, mr = 16, mt = 32, mb = 44;
    const double pw = width - ml - mr, ph = height - mt - mb;

    Range xr, yr;
    for (const auto& s : series) {
        for (double v : s.x) xr.include(v);
        for (double v : s.y) yr.include(v);
    }
    xr.pad();
    yr.pad();
    auto px = [&](double x) { return ml + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto py = [&](double y) { return mt + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           std::to_string(width) + "\" height=\"" + std::to_string(height) +
           "\" viewBox=\"0 0 " + std::to_string(width) + " " +
           std::to_string(height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(width / 2.0) +
           "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"14\">" + title + "</text>\n";

    // axes and ticks
    out += "<g stroke=\"#444\" stroke-width=\"1\" fill=\"none\">\n";
    out += "<path d=\"M" + num(ml) + " " + num(mt) + " V" + num(mt + ph) + " H" +
           num(ml + pw) + "\"/>\n</g>\n";
    out += "<g font-family=\"sans-serif\" font-size=\"10\" fill=\"#222\">\n";
    for (int i = 0; i <= 5; ++i) {
        const double fx = xr.lo + (xr.hi - xr.lo) * i / 5.0;
        const double fy = yr.lo + (yr.hi - yr.lo) * i / 5.0;
        out += "<text x=\"" + num(px(fx)) + "\" y=\"" + num(mt + ph + 14) +
               "\" text-anchor=\"middle\">" + num(fx) + "</text>\n";
        out += "<text x=\"" + num(ml - 6) + "\" y=\"" + num(py(fy) + 3) +
               "\" text-anchor=\"end\">" + num(fy) + "</text>\n";
        out += "<line x1=\"" + num(ml) + "\" x2=\"" + num(ml + pw) + "\" y1=\"" +
               num(py(fy)) + "\" y2=\"" + num(py(fy)) +
               "\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n";
    }
    out += "<text x=\"" + num(ml + pw / 2) + "\" y=\"" + num(mt + ph + 32) +
           "\" text-anchor=\"middle\">" + x_label + "</text>\n";
    out += "<text x=\"14\" y=\"" + num(mt + ph / 2) +
           "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
           num(mt + ph / 2) + ")\">" + y_label + "</text>\n";
    out += "</g>\n";

    for (const auto& s : series) {
        out += "<polyline fill=\"none\" stroke=\"" + s.color +
               "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.y[i])) continue;
            out += num(px(s.x[i])) + "," + num(py(s.y[i])) + " ";
        }
        out += "\"/>\n";
    }

    double ly = mt + 8;
    for (const auto& s : series) {
        out += "<line x1=\"" + num(ml + pw - 120) + "\" x2=\"" +
               num(ml + pw - 96) + "\" y1=\"" + num(ly) + "\" y2=\"" + num(ly) +
               "\" stroke=\"" + s.color + "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + num(ml + pw - 90) + "\" y=\"" + num(ly + 3) +
               "\" font-family=\"sans-serif\" font-size=\"10\">" + s.label +
               "</text>\n";
        ly += 14;
    }
    out += "</svg>\n";
    return out;
}

std::string svg_root_locus(const std::string& title,
                           const std::vector<SvgRootGroup>& groups, int size) {
    const double c = size / 2.0;
    double max_r = 1.0;
    for (const auto& g : groups) {
        for (const auto& z : g.roots) max_r = std::max(max_r, std::abs(z));
    }
    const double scale = (c - 30) / max_r;

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           std::to_string(size) + "\" height=\"" + std::to_string(size) +
           "\" viewBox=\"0 0 " + std::to_string(size) + " " +
           std::to_string(size) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(c) +
           "\" y=\"16\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"13\">" + title + "</text>\n";
    out += "<line x1=\"0\" x2=\"" + std::to_string(size) + "\" y1=\"" + num(c) +
           "\" y2=\"" + num(c) + "\" stroke=\"#ccc\"/>\n";
    out += "<line y1=\"0\" y2=\"" + std::to_string(size) + "\" x1=\"" + num(c) +
           "\" x2=\"" + num(c) + "\" stroke=\"#ccc\"/>\n";
    out += "<circle cx=\"" + num(c) + "\" cy=\"" + num(c) + "\" r=\"" +
           num(scale) + "\" fill=\"none\" stroke=\"#333\" stroke-dasharray=\"4 3\"/>\n";

    double ly = 28;
    for (const auto& g : groups) {
        for (const auto& z : g.roots) {
            out += "<circle cx=\"" + num(c + z.real() * scale) + "\" cy=\"" +
                   num(c - z.imag() * scale) + "\" r=\"2.5\" fill=\"" + g.color +
                   "\"/>\n";
        }
        if (!g.label.empty()) {
            out += "<circle cx=\"12\" cy=\"" + num(ly) + "\" r=\"3\" fill=\"" +
                   g.color + "\"/>\n";
            out += "<text x=\"20\" y=\"" + num(ly + 3) +
                   "\" font-family=\"sans-serif\" font-size=\"10\">" + g.label +
                   "</text>\n";
            ly += 13;
        }
    }
    out += "</svg>\n";
    return out;
}

}  // namespace mfac

#pragma once

#include <complex>
#include <string>
#include <vector>

namespace mfac {

/// Minimal self-contained SVG line charts: inline styling, no external
/// assets, deterministic float formatting.
struct SvgSeries {
    std::string label;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
};

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label,
                           const std::vector<SvgSeries>& series,
                           int width = 720, int height = 420);

/// Unit-circle plot with root markers, one color per group.
struct SvgRootGroup {
    std::string label;
    std::string color;
    std::vector<std::complex<double>> roots;
};

std::string svg_root_locus(const std::string& title,
                           const std::vector<SvgRootGroup>& groups,
                           int size = 480);

}  // namespace mfac

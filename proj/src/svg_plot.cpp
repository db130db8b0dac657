// SPDX-License-Identifier: Apache-2.0

#include "sortmc/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <vector>

namespace sortmc {
namespace {

constexpr double kWidth = 880, kHeight = 560;
constexpr double kLeft = 90, kRight = 680, kTop = 50, kBottom = 500;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string describe(const BenchRecord& rec) {
    std::string s = "algorithm=" + std::string(algorithm_name(rec.algorithm)) +
                    " n=" + std::to_string(rec.n);
    if (rec.r) {
        char buf[32];
        std::snprintf(buf, sizeof buf, " r=%g", *rec.r);
        s += buf;
    }
    return s;
}

} // namespace

void render_loglog_svg(std::span<const BenchRecord> records, const PlotOptions& options,
                       const std::filesystem::path& path) {
    std::map<AlgorithmId, std::vector<std::pair<double, double>>> series;
    for (const BenchRecord& rec : records) {
        if (!rec.skip_reason.empty())
            continue;
        double x;
        if (options.x == PlotX::Size) {
            x = static_cast<double>(rec.n);
        } else {
            x = rec.r.value_or(options.ratio_floor);
            if (x <= 0.0)
                x = options.ratio_floor; // the sweep's zero point
        }
        const double y = static_cast<double>(rec.median_nanos);
        if (x <= 0.0 || y <= 0.0)
            throw std::invalid_argument("render_loglog_svg: non-positive value in record " +
                                        describe(rec));
        series[rec.algorithm].emplace_back(x, y);
    }
    if (series.empty())
        throw std::invalid_argument("render_loglog_svg: no plottable records");

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (auto& [algo, pts] : series) {
        std::sort(pts.begin(), pts.end());
        for (auto [x, y] : pts) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }

    // Expand to whole decades so ticks land on the frame.
    double lx0 = std::floor(std::log10(xmin));
    double lx1 = std::ceil(std::log10(xmax));
    double ly0 = std::floor(std::log10(ymin));
    double ly1 = std::ceil(std::log10(ymax));
    if (lx1 - lx0 < 1.0)
        lx1 = lx0 + 1.0;
    if (ly1 - ly0 < 1.0)
        ly1 = ly0 + 1.0;

    auto px = [&](double x) { return kLeft + (std::log10(x) - lx0) / (lx1 - lx0) * (kRight - kLeft); };
    auto py = [&](double y) { return kBottom - (std::log10(y) - ly0) / (ly1 - ly0) * (kBottom - kTop); };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) +
           "\" height=\"" + fmt(kHeight) + "\" viewBox=\"0 0 " + fmt(kWidth) + " " +
           fmt(kHeight) + "\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + fmt(kWidth) + "\" height=\"" + fmt(kHeight) +
           "\" fill=\"white\"/>\n";

    if (!options.title.empty())
        svg += "<text x=\"" + fmt((kLeft + kRight) / 2) +
               "\" y=\"28\" text-anchor=\"middle\" font-size=\"16\" font-family=\"sans-serif\">" +
               options.title + "</text>\n";

    // Decade grid and tick labels.
    for (int d = static_cast<int>(lx0); d <= static_cast<int>(lx1); ++d) {
        const double x = px(std::pow(10.0, d));
        svg += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(kTop) + "\" x2=\"" + fmt(x) +
               "\" y2=\"" + fmt(kBottom) + "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(kBottom + 22) +
               "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">1e" +
               std::to_string(d) + "</text>\n";
    }
    for (int d = static_cast<int>(ly0); d <= static_cast<int>(ly1); ++d) {
        const double y = py(std::pow(10.0, d));
        svg += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(kRight) +
               "\" y2=\"" + fmt(y) + "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + fmt(kLeft - 8) + "\" y=\"" + fmt(y + 4) +
               "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\">1e" +
               std::to_string(d) + "</text>\n";
    }

    // Frame.
    svg += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kTop) + "\" width=\"" +
           fmt(kRight - kLeft) + "\" height=\"" + fmt(kBottom - kTop) +
           "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

    // Axis labels.
    const std::string xlabel = options.x == PlotX::Size ? "array size n [records]"
                                                        : "swap ratio r [dimensionless]";
    svg += "<text x=\"" + fmt((kLeft + kRight) / 2) + "\" y=\"" + fmt(kBottom + 44) +
           "\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\">" + xlabel +
           "</text>\n";
    svg += "<text x=\"24\" y=\"" + fmt((kTop + kBottom) / 2) +
           "\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 24 " +
           fmt((kTop + kBottom) / 2) + ")\">median sort time [ns]</text>\n";

    // One polyline per algorithm plus point markers.
    std::size_t color = 0;
    double legend_y = kTop + 10;
    for (const auto& [algo, pts] : series) {
        const char* stroke = kPalette[color % (sizeof kPalette / sizeof *kPalette)];
        std::string points;
        for (auto [x, y] : pts)
            points += fmt(px(x)) + "," + fmt(py(y)) + " ";
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(stroke) +
               "\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
        for (auto [x, y] : pts)
            svg += "<circle cx=\"" + fmt(px(x)) + "\" cy=\"" + fmt(py(y)) +
                   "\" r=\"3\" fill=\"" + std::string(stroke) + "\"/>\n";

        svg += "<line x1=\"" + fmt(kRight + 16) + "\" y1=\"" + fmt(legend_y) + "\" x2=\"" +
               fmt(kRight + 44) + "\" y2=\"" + fmt(legend_y) + "\" stroke=\"" +
               std::string(stroke) + "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + fmt(kRight + 50) + "\" y=\"" + fmt(legend_y + 4) +
               "\" font-size=\"13\" font-family=\"sans-serif\">" +
               std::string(algorithm_name(algo)) + "</text>\n";
        legend_y += 22;
        ++color;
    }

    svg += "</svg>\n";

    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out)
            throw std::runtime_error("render_loglog_svg: cannot open " + tmp.string());
        out << svg;
        if (!out.flush())
            throw std::runtime_error("render_loglog_svg: write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

} // namespace sortmc

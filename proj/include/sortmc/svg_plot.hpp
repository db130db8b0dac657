// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "sortmc/bench.hpp"

namespace sortmc {

enum class PlotX { Size, Ratio };

struct PlotOptions {
    PlotX x = PlotX::Size;
    std::string title;
    double ratio_floor = 1e-7; // r <= 0 rows are plotted here
};

/// Standalone SVG, log-log axes, one polyline per algorithm, legend and
/// labeled decade ticks. Throws on an empty record set and on non-positive
/// plotted values (the error names the record).
void render_loglog_svg(std::span<const BenchRecord> records, const PlotOptions& options,
                       const std::filesystem::path& path);

} // namespace sortmc

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "spdc/trace.hpp"

namespace spdc {

/// Gaps below this (including exact zeros and small negatives) are drawn at it.
inline constexpr double kPlotGapFloor = 1e-16;

/// SVG of log10(gap) against passes: one polyline per trace, legend in input
/// order. Records with a non-finite gap are skipped. Throws ConfigError on an
/// empty trace set.
void write_svg(std::ostream& out, const std::vector<ConvergenceTrace>& traces);
void emit_plot(const std::vector<ConvergenceTrace>& traces, const std::string& path);

}  // namespace spdc

#pragma once

#include <string>
#include <vector>

#include "citeflow/summary.hpp"

namespace citeflow {

// Static SVG line chart of the five series statistics (wVar(LI), wVar(LG),
// wVar(LB), wCov(LG,LB), CEI) over cited years. Failed points leave gaps.
void write_series_chart_svg(const std::vector<SeriesPoint>& points, const std::string& path);

}  // namespace citeflow

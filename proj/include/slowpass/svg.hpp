#pragma once

#include <string>
#include <vector>

#include "slowpass/sweep.hpp"

namespace slowpass::svg {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool markers = false;  ///< dots instead of a polyline
    bool dashed = false;
};

struct Plot {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    int width = 640;
    int height = 480;
    std::vector<Series> series;
};

/// Self-contained SVG document. Non-finite points and, on log axes,
/// non-positive ones are dropped.
std::string render(const Plot& plot);

/// Cells of a region map colored by class (I, II, III, unclassified) on
/// log-log axes.
std::string render_region_raster(const RegionMap& map, const std::string& title);

} // namespace slowpass::svg

#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slowpass/applications.hpp"
#include "slowpass/dynamics.hpp"
#include "slowpass/fitting.hpp"
#include "slowpass/sweep.hpp"
#include "slowpass/theory.hpp"
#include "slowpass/tipping.hpp"

namespace slowpass::csv {

/// 17 significant digits; "nan", "inf" and "-inf" for non-finite values.
std::string format_double(double v);

void write_trajectory(std::ostream& os, const Trajectory& traj);

struct TippingRow {
    SlowPassageParams params;
    TippingReport report;
};
void write_tipping(std::ostream& os, std::span<const TippingRow> rows);

void write_region(std::ostream& os, const RegionMap& map);
void write_region_cells(std::ostream& os, std::span<const CellResult> cells);
void write_boundary(std::ostream& os, const BoundaryCurve& curve, bool header = true);
void write_scaling(std::ostream& os, const ScalingResult& result);

struct LabeledFit {
    std::string label;
    PowerLawFit fit;
};
void write_fits(std::ostream& os, std::span<const LabeledFit> fits);
void write_exponent_fit(std::ostream& os, const ExponentLawFit& fit);
void write_delays(std::ostream& os, std::span<const DelayResult> rows);

struct EnvelopeRow {
    double epsilon = 0.0;
    double dt = 0.0;
    EnvelopeCheck check;
};
void write_envelopes(std::ostream& os, std::span<const EnvelopeRow> rows);

struct CornerRow {
    double epsilon = 0.0;
    double dt = 0.0;
    CornerReport report;
};
void write_corners(std::ostream& os, std::span<const CornerRow> rows);

/// Two numeric columns picked by header name; "#" lines and blanks skipped.
std::vector<XY> read_points(std::istream& is, std::string_view x_col = "x",
                            std::string_view y_col = "y");

} // namespace slowpass::csv

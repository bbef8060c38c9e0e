#include "slowpass/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include "slowpass/errors.hpp"

namespace slowpass::csv {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

std::string fd(double v) { return format_double(v); }

std::string opt_index(bool found, std::uint64_t m) { return found ? std::to_string(m) : ""; }

} // namespace

void write_trajectory(std::ostream& os, const Trajectory& traj) {
    os << "m,t,x\n";
    for (const Sample& s : traj.samples) os << s.m << ',' << fd(s.t) << ',' << fd(s.x) << '\n';
}

void write_tipping(std::ostream& os, std::span<const TippingRow> rows) {
    os << "epsilon,dt,alpha,t0,found,m_star,t_star,x_star,crossings_before,class\n";
    for (const auto& r : rows) {
        const auto& p = r.params;
        const auto& t = r.report;
        os << fd(p.epsilon) << ',' << fd(p.dt) << ',' << fd(p.alpha) << ',' << fd(p.t0) << ','
           << (t.found ? "true" : "false") << ',' << opt_index(t.found, t.m_star) << ','
           << fd(t.t_star) << ',' << fd(t.x_star) << ',' << t.crossings_before << ','
           << to_string(t.found ? classify(t) : SolutionClass::Unclassified) << '\n';
    }
}

void write_region_cells(std::ostream& os, std::span<const CellResult> cells) {
    os << "epsilon,dt,m_star,t_star,class\n";
    for (const auto& c : cells) {
        os << fd(c.epsilon) << ',' << fd(c.dt) << ',' << opt_index(c.report.found, c.report.m_star)
           << ',' << fd(c.report.t_star) << ',' << to_string(c.cls) << '\n';
    }
}

void write_region(std::ostream& os, const RegionMap& map) { write_region_cells(os, map.cells); }

void write_boundary(std::ostream& os, const BoundaryCurve& curve, bool header) {
    if (header) os << "m,side,epsilon,dt\n";
    for (const auto& p : curve.points) {
        os << curve.m << ',' << to_string(curve.side) << ',' << fd(p.epsilon) << ',' << fd(p.dt)
           << '\n';
    }
}

void write_scaling(std::ostream& os, const ScalingResult& result) {
    os << "epsilon,dt,status,projected_steps,m_star,t_star,scaled_t_star\n";
    for (const auto& r : result.rows) {
        const bool ok = r.status == ScalingStatus::Ok;
        os << fd(r.epsilon) << ',' << fd(r.dt) << ',' << to_string(r.status) << ','
           << fd(r.projected_steps) << ',' << opt_index(ok, r.m_star) << ','
           << (ok ? fd(r.t_star) : "") << ',' << (ok ? fd(r.scaled_t_star) : "") << '\n';
    }
}

void write_fits(std::ostream& os, std::span<const LabeledFit> fits) {
    os << "label,C,b,r2,n\n";
    for (const auto& f : fits) {
        os << f.label << ',' << fd(f.fit.C) << ',' << fd(f.fit.b) << ',' << fd(f.fit.r2) << ','
           << f.fit.n << '\n';
    }
}

void write_exponent_fit(std::ostream& os, const ExponentLawFit& fit) {
    os << "p,q,residual\n" << fd(fit.p) << ',' << fd(fit.q) << ',' << fd(fit.residual) << '\n';
}

void write_delays(std::ostream& os, std::span<const DelayResult> rows) {
    os << "epsilon,dt,t_switch,delta_T\n";
    for (const auto& r : rows) {
        os << fd(r.epsilon) << ',' << fd(r.dt) << ',' << (r.switched ? fd(r.t_switch) : "") << ','
           << (r.switched ? fd(r.delta_T) : "") << '\n';
    }
}

void write_envelopes(std::ostream& os, std::span<const EnvelopeRow> rows) {
    os << "epsilon,dt,window,samples,r_min,r_max,sandwich,passed\n";
    for (const auto& r : rows) {
        const auto& c = r.check;
        os << fd(r.epsilon) << ',' << fd(r.dt) << ',' << to_string(c.window) << ',' << c.samples
           << ',' << fd(c.realized_lo) << ',' << fd(c.realized_hi) << ','
           << (c.sandwich_holds ? "true" : "false") << ',' << (c.passed ? "true" : "false") << '\n';
    }
}

void write_corners(std::ostream& os, std::span<const CornerRow> rows) {
    os << "epsilon,dt,m1,m2,c1_star,c2,K_star,y_min,y_max,decreasing,m_star,tipping_ratio\n";
    for (const auto& r : rows) {
        const auto& c = r.report;
        os << fd(r.epsilon) << ',' << fd(r.dt) << ',' << c.m1 << ',' << c.m2 << ','
           << fd(c.c1_star) << ',' << fd(c.c2) << ',' << fd(c.K_star) << ',' << fd(c.y_min) << ','
           << fd(c.y_max) << ',' << (c.decreasing ? "true" : "false") << ','
           << opt_index(c.tipped, c.m_star) << ',' << fd(c.tipping_ratio) << '\n';
    }
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, ',')) {
        const auto b = cur.find_first_not_of(" \t\r");
        const auto e = cur.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : cur.substr(b, e - b + 1));
    }
    return out;
}

double parse_number(const std::string& s, std::size_t line_no) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto res = std::from_chars(s.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) {
        throw UsageError("line " + std::to_string(line_no) + ": not a number: '" + s + "'");
    }
    return v;
}

} // namespace

std::vector<XY> read_points(std::istream& is, std::string_view x_col, std::string_view y_col) {
    std::string line;
    std::size_t line_no = 0;
    std::optional<std::size_t> xi, yi;
    std::vector<XY> pts;
    while (std::getline(is, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto cells = split(line);
        if (!xi) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (cells[i] == x_col) xi = i;
                if (cells[i] == y_col) yi = i;
            }
            if (!xi || !yi) {
                throw UsageError("header must contain columns '" + std::string(x_col) + "' and '" +
                                 std::string(y_col) + "'");
            }
            continue;
        }
        if (cells.size() <= std::max(*xi, *yi)) {
            throw UsageError("line " + std::to_string(line_no) + ": too few columns");
        }
        pts.push_back({parse_number(cells[*xi], line_no), parse_number(cells[*yi], line_no)});
    }
    if (!xi) throw UsageError("no header line found");
    return pts;
}

} // namespace slowpass::csv

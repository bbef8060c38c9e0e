#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slowpass/dynamics.hpp"
#include "slowpass/tipping.hpp"

namespace slowpass {

enum class GridSpacing { Linear, Log };

struct GridSpec {
    std::vector<double> eps_values;
    std::vector<double> dt_values;
    double t0 = -1.0;
    double alpha = 1.0;
    GridSpacing spacing = GridSpacing::Log;

    /// Throws DomainError unless both axes are strictly increasing and positive.
    void validate() const;

    /// n values from lo to hi inclusive.
    static std::vector<double> axis(double lo, double hi, std::size_t n, GridSpacing spacing);

    /// Default experiment plane: 512 x 512 log-spaced cells on [1e-4, 0.5]^2.
    static GridSpec canonical(std::size_t n_eps = 512, std::size_t n_dt = 512);
};

struct CellResult {
    double epsilon = 0.0;
    double dt = 0.0;
    TippingReport report;
    /// Unclassified when no tipping point was found within the step cap.
    SolutionClass cls = SolutionClass::Unclassified;
};

/// One result per grid cell, stored row-major by (eps index, dt index).
struct RegionMap {
    std::vector<double> eps_values;
    std::vector<double> dt_values;
    std::vector<CellResult> cells;

    const CellResult& at(std::size_t i_eps, std::size_t j_dt) const {
        return cells[i_eps * dt_values.size() + j_dt];
    }
    bool empty() const { return cells.empty(); }
};

/// Simulate one (eps, dt) cell of the quadratic model to its tipping point.
CellResult evaluate_cell(double epsilon, double dt, double t0, double alpha, const StopRule& stop);

RegionMap sweep_grid(const GridSpec& spec, const StopRule& stop, unsigned threads = 1);

/// Cells of Omega_m (see in_negative_tipping_region).
std::vector<CellResult> extract_region(const RegionMap& map, std::uint64_t m);

// ---------------------------------------------------------------------------
// Boundary tracing

enum class BoundarySide { Top, Bottom };

std::string_view to_string(BoundarySide side);

/// Omega_m membership of a single (eps, dt) cell; the run stops as soon as
/// the answer is known (at most m + 1 steps).
bool omega_membership(double epsilon, double dt, std::uint64_t m, double t0 = -1.0,
                      double alpha = 1.0);

struct BoundaryPoint {
    double epsilon = 0.0;
    double dt = 0.0;          ///< bracket midpoint
    double dt_inside = 0.0;   ///< member end of the final bracket
    double dt_outside = 0.0;  ///< non-member end of the final bracket
};

struct BoundaryCurve {
    std::uint64_t m = 0;
    BoundarySide side = BoundarySide::Top;
    std::vector<BoundaryPoint> points;        ///< sorted by epsilon
    std::vector<double> failed_eps;           ///< eps values without a bracket
};

/// Bisect on dt between a member and a non-member of Omega_m until the
/// bracket width is below tol * dt_inside. Throws BracketingError if the
/// two ends have the same membership.
BoundaryPoint bisect_boundary(double epsilon, std::uint64_t m, double dt_inside,
                              double dt_outside, double tol, double t0 = -1.0,
                              double alpha = 1.0);

struct BoundaryTraceSpec {
    std::uint64_t m = 3;
    BoundarySide side = BoundarySide::Bottom;
    std::vector<double> eps_values;
    double t0 = -1.0;
    double alpha = 1.0;
    /// dt scan window; dt_lo <= 0 means 0.5 * eps.
    double dt_lo = 0.0;
    double dt_hi = 0.5;
    std::size_t scan_points = 2000;
    double tol = 1e-6;
};

/// For every eps: scan dt on a log grid, take the longest run of Omega_m
/// members, bracket the requested edge of that run and bisect. An eps with
/// no member run is rescanned once at 4x resolution and then listed in
/// failed_eps.
BoundaryCurve trace_boundary(const BoundaryTraceSpec& spec, unsigned threads = 1);

// ---------------------------------------------------------------------------
// Tipping-time scaling

enum class ScalingStatus { Ok, NoTipping, OutOfBudget };

std::string_view to_string(ScalingStatus s);

struct ScalingRow {
    double epsilon = 0.0;
    double dt = 0.0;
    ScalingStatus status = ScalingStatus::Ok;
    double projected_steps = 0.0;
    std::uint64_t m_star = 0;
    double t_star = 0.0;
    double scaled_t_star = 0.0;  ///< t_star / eps^{2/3}
};

struct ScalingResult {
    std::vector<ScalingRow> rows;
    std::vector<std::string> warnings;

    std::size_t reproduced() const;
};

struct ScalingOptions {
    double t0 = -1.0;
    double alpha = 1.0;
    double step_budget = 2.0e10;
    unsigned threads = 1;
};

/// Steps needed to cross the corner layer: (-t0 + 2 eps^{2/3}) / dt.
double projected_steps(double epsilon, double dt, double t0);

/// Fixed ratio: dt = ratio * eps.
ScalingResult scaling_experiment(double ratio, const std::vector<double>& eps_values,
                                 const ScalingOptions& options = {});

/// Power law: dt = C * eps^b_exp.
ScalingResult scaling_experiment_powerlaw(double C, double b_exp,
                                          const std::vector<double>& eps_values,
                                          const ScalingOptions& options = {});

} // namespace slowpass

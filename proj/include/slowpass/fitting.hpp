#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace slowpass {

struct XY {
    double x = 0.0;
    double y = 0.0;
};

/// y = C x^b fitted in log-log space.
struct PowerLawFit {
    double C = 0.0;
    double b = 0.0;
    double r2 = 0.0;
    std::size_t n = 0;

    double operator()(double x) const;
};

/// Unweighted least squares on (ln x, ln y). Needs at least two points, all
/// strictly positive (DomainError), and two distinct x values (DomainError).
PowerLawFit fit_power_law(std::span<const XY> points);

/// b_m = 1 - 1/(p m + q).
struct ExponentLawFit {
    double p = 0.0;
    double q = 0.0;
    double residual = 0.0;  ///< RMS of u_m = 1/(1 - b_m) residuals
    double b_rms = 0.0;     ///< RMS of b_m residuals
    std::size_t n = 0;

    double operator()(double m) const { return 1.0 - 1.0 / (p * m + q); }
};

struct IndexedExponent {
    double m = 0.0;
    double b = 0.0;
};

/// Straight line through (m, 1/(1 - b_m)).
ExponentLawFit fit_exponent_law_linear(std::span<const IndexedExponent> pairs);

/// Least squares on b_m itself; Levenberg-Marquardt started from the linear fit.
ExponentLawFit fit_exponent_law(std::span<const IndexedExponent> pairs);

/// Average exponents sharing the same m, sorted by m.
std::vector<IndexedExponent> average_exponents_by_index(std::span<const IndexedExponent> pairs);

/// Exponent of a fitted boundary curve of Omega_m; top is the upper edge.
struct BoundaryExponent {
    unsigned m = 0;
    bool top = false;
    double b = 0.0;
};

/// Inputs for the exponent law: the bottom edge of Omega_m and the top edge
/// of Omega_{m+2} share index m and are averaged. Top edges of Omega_1 and
/// Omega_3 are dropped.
std::vector<IndexedExponent> pair_boundary_exponents(std::span<const BoundaryExponent> curves);

} // namespace slowpass

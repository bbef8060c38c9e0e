#pragma once

#include <cstddef>
#include <functional>

namespace slowpass {

struct QuadratureOptions {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    std::size_t initial_panels = 8;
    std::size_t max_panels = 20000;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t panels = 0;
    bool converged = false;
};

/// Globally adaptive 7/15-point Gauss-Kronrod integration of f over [a, b].
/// The panel with the largest error estimate is bisected until the summed
/// estimate meets max(abs_tol, rel_tol * |value|). Works for a > b too.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureOptions& options = {});

} // namespace slowpass

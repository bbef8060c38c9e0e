#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slowpass/dynamics.hpp"

namespace slowpass {

enum class RootLabel { UpperStable, Unstable, LowerStable, Fold };

std::string_view to_string(RootLabel label);

struct LabeledRoot {
    double y = 0.0;
    RootLabel label = RootLabel::UpperStable;
};

/// Real roots of y - y^3/3 = p, in decreasing order. At |p| = 2/3 the double
/// root y = sign(p) is reported once, labeled Fold.
struct CubicEquilibria {
    double p = 0.0;
    std::vector<LabeledRoot> roots;

    std::optional<double> find(RootLabel label) const;
};

CubicEquilibria cubic_equilibria(double p);

/// Fold value of the cubic, 2/3.
inline constexpr double kFold = 2.0 / 3.0;

/// Upper stable equilibrium at t0, the start of the bistable sweep.
double bistable_start(double t0 = -1.0);

struct DelayResult {
    double epsilon = 0.0;
    double dt = 0.0;
    bool switched = false;
    std::uint64_t m_switch = 0;
    double t_switch = 0.0;
    double delta_T = 0.0;  ///< t_switch - 2/3
    double y_switch = 0.0;
    std::string warning;
};

/// True when y has left the upper branch at time t: below the middle root
/// while three roots exist, below 1 once the fold is passed.
bool below_switch_threshold(double y, double t);

/// Start at the upper equilibrium plus eps and report the first switch.
DelayResult bistable_delay(double epsilon, double dt, double t0 = -1.0,
                           const StopRule& stop = {});

/// Cubic trajectory from the same start, run until t >= t_end.
Trajectory simulate_bistable(double epsilon, double dt, double t_end, double t0 = -1.0,
                             const SamplingPolicy& sampling = {});

enum class LandingStatus { Converged, Far, ConvergenceUnknown };

std::string_view to_string(LandingStatus s);

struct LandingReport {
    double y_final = 0.0;
    double t_final = 0.0;
    double target = 0.0;    ///< lower stable root at t_final
    double distance = 0.0;
    double tolerance = 0.0; ///< 10 eps^{1/3}
    LandingStatus status = LandingStatus::ConvergenceUnknown;
};

/// Terminal state of a switched trajectory compared with the lower stable
/// equilibrium at the final time. Throws UsageError for an unswitched run.
LandingReport bistable_landing(const Trajectory& traj, const DelayResult& delay, double epsilon);

} // namespace slowpass

#include "slowpass/applications.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "slowpass/errors.hpp"

namespace slowpass {

namespace {

constexpr double kFoldTol = 1e-12;

double g(double y) { return y - y * y * y / 3.0; }

// Root of g(y) = p on [lo, hi] where g is monotone and changes side of p.
double solve_monotone(double p, double lo, double hi) {
    double flo = g(lo) - p;
    double y = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double f = g(y) - p;
        if (f == 0.0) return y;
        if ((f < 0.0) == (flo < 0.0)) {
            lo = y;
            flo = f;
        } else {
            hi = y;
        }
        const double df = 1.0 - y * y;
        double next = df != 0.0 ? y - f / df : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - y) <= 4e-16 * std::max(1.0, std::abs(y)) || hi - lo <= 4e-16 * std::max(1.0, std::abs(y))) {
            return next;
        }
        y = next;
    }
    return y;
}

// Roots for p >= 0; negative p is handled by symmetry.
std::vector<LabeledRoot> roots_nonnegative(double p) {
    std::vector<LabeledRoot> out;
    const bool fold = std::abs(p - kFold) <= kFoldTol;
    if (fold) {
        out.push_back({1.0, RootLabel::Fold});
    } else if (p < kFold) {
        double hi = 2.0;
        while (g(hi) > p) hi *= 2.0;
        out.push_back({solve_monotone(p, 1.0, hi), RootLabel::UpperStable});
        out.push_back({solve_monotone(p, -1.0, 1.0), RootLabel::Unstable});
    }
    double lo = -2.0;
    while (g(lo) < p) lo *= 2.0;
    const double lower = fold ? -2.0 : solve_monotone(p, lo, -1.0);
    out.push_back({lower, RootLabel::LowerStable});
    return out;
}

RootLabel mirror(RootLabel l) {
    switch (l) {
    case RootLabel::UpperStable: return RootLabel::LowerStable;
    case RootLabel::LowerStable: return RootLabel::UpperStable;
    default: return l;
    }
}

} // namespace

std::string_view to_string(RootLabel label) {
    switch (label) {
    case RootLabel::UpperStable: return "upper-stable";
    case RootLabel::Unstable: return "unstable";
    case RootLabel::LowerStable: return "lower-stable";
    case RootLabel::Fold: return "fold";
    }
    return "?";
}

std::optional<double> CubicEquilibria::find(RootLabel label) const {
    for (const auto& r : roots) {
        if (r.label == label) return r.y;
    }
    return std::nullopt;
}

CubicEquilibria cubic_equilibria(double p) {
    if (!std::isfinite(p)) throw DomainError("p must be finite");
    CubicEquilibria e;
    e.p = p;
    if (p >= 0.0) {
        e.roots = roots_nonnegative(p);
    } else {
        for (const auto& r : roots_nonnegative(-p)) e.roots.push_back({-r.y, mirror(r.label)});
        std::reverse(e.roots.begin(), e.roots.end());
    }
    return e;
}

double bistable_start(double t0) {
    const auto upper = cubic_equilibria(t0).find(RootLabel::UpperStable);
    if (!upper) throw DomainError("no upper stable equilibrium at t0 >= 2/3");
    return *upper;
}

bool below_switch_threshold(double y, double t) {
    if (t >= kFold) return y < 1.0;
    if (t <= -kFold || y >= 1.0) return false;
    const auto mid = cubic_equilibria(t).find(RootLabel::Unstable);
    return mid && y < *mid;
}

DelayResult bistable_delay(double epsilon, double dt, double t0, const StopRule& stop) {
    const SlowPassageParams params = make_cubic_params(epsilon, dt, t0, bistable_start(t0) + epsilon);
    DelayResult r;
    r.epsilon = epsilon;
    r.dt = dt;
    std::optional<Sample> hit;
    run_observed(MapKind::CubicBistable, params, stop, [&](const Sample& s) {
        if (below_switch_threshold(s.x, s.t)) {
            hit = s;
            return true;
        }
        return false;
    });
    if (hit) {
        r.switched = true;
        r.m_switch = hit->m;
        r.t_switch = hit->t;
        r.y_switch = hit->x;
        r.delta_T = hit->t - kFold;
    } else {
        r.warning = "no switch within the step cap";
    }
    if (params.ratio() > std::log(2.0) / 6.0 * (1.0 + 1e-9)) {
        std::ostringstream os;
        os << "dt/eps = " << params.ratio() << " exceeds ln2/6";
        r.warning = r.warning.empty() ? os.str() : r.warning + "; " + os.str();
    }
    return r;
}

Trajectory simulate_bistable(double epsilon, double dt, double t_end, double t0,
                             const SamplingPolicy& sampling) {
    const SlowPassageParams params = make_cubic_params(epsilon, dt, t0, bistable_start(t0) + epsilon);
    StopRule stop;
    stop.step_cap = UINT64_MAX;
    stop.t_max = t_end;
    return simulate(MapKind::CubicBistable, params, stop, sampling);
}

std::string_view to_string(LandingStatus s) {
    switch (s) {
    case LandingStatus::Converged: return "converged";
    case LandingStatus::Far: return "far";
    case LandingStatus::ConvergenceUnknown: return "convergence-unknown";
    }
    return "?";
}

LandingReport bistable_landing(const Trajectory& traj, const DelayResult& delay, double epsilon) {
    if (!delay.switched) throw UsageError("landing needs a switched trajectory");
    LandingReport r;
    r.y_final = traj.final.x;
    r.t_final = traj.final.t;
    r.tolerance = 10.0 * std::cbrt(epsilon);
    if (traj.final.m <= delay.m_switch) return r;
    const auto target = cubic_equilibria(r.t_final).find(RootLabel::LowerStable);
    if (!target) return r;
    r.target = *target;
    r.distance = std::abs(r.y_final - r.target);
    r.status = r.distance <= r.tolerance ? LandingStatus::Converged : LandingStatus::Far;
    return r;
}

} // namespace slowpass

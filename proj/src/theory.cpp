#include "slowpass/theory.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "slowpass/tipping.hpp"

namespace slowpass {

namespace {

const double kLn2Over6 = std::log(2.0) / 6.0;

/// Largest m with t0 + m*dt <= threshold (threshold >= t0).
std::uint64_t last_index_at_or_below(double threshold, double t0, double dt) {
    double guess = std::floor((threshold - t0) / dt);
    std::uint64_t m = guess > 0.0 ? static_cast<std::uint64_t>(guess) : 0;
    while (m > 0 && time_of(m, t0, dt) > threshold) --m;
    while (time_of(m + 1, t0, dt) <= threshold) ++m;
    return m;
}

void require_admissible_ratio(const TheoryConstants& consts, const SlowPassageParams& params) {
    if (!(params.ratio() < consts.delta0)) {
        throw PreconditionError("dt/eps = " + std::to_string(params.ratio()) +
                                " is not below delta0 = " + std::to_string(consts.delta0));
    }
}

} // namespace

std::string_view to_string(EnvelopeWindow w) {
    return w == EnvelopeWindow::Outer ? "Outer" : "Corner";
}

TheoryConstants constants(const SlowPassageParams& params) {
    if (!(params.t0 < 0.0)) throw DomainError("t0 must be negative");
    params.validate();
    TheoryConstants c;
    const double root = std::sqrt(-params.t0);
    c.delta0 = std::min({root / 2.0, 1.0 / (3.0 * root), kLn2Over6});
    c.K = params.alpha * std::abs(params.t0) + 0.25;
    c.c1 = std::cbrt(c.K * c.K);
    c.m0 = last_index_at_or_below(0.0, params.t0, params.dt);
    const double outer_end = -c.c1 * std::cbrt(params.epsilon * params.epsilon);
    if (params.t0 <= outer_end) {
        c.m1 = last_index_at_or_below(outer_end, params.t0, params.dt);
    }
    return c;
}

// ---------------------------------------------------------------------------

OuterEnvelopeObserver::OuterEnvelopeObserver(const TheoryConstants& consts,
                                             const SlowPassageParams& params)
    : epsilon_(params.epsilon),
      t_end_(-consts.c1 * std::cbrt(params.epsilon * params.epsilon)),
      K_(consts.K) {
    check_.window = EnvelopeWindow::Outer;
}

bool OuterEnvelopeObserver::operator()(const Sample& s) {
    if (s.t > t_end_) return true;
    const double branch = std::sqrt(-s.t);
    const double z = s.x - branch;
    const double r = z * std::abs(s.t) / epsilon_;
    check_.realized_lo = std::min(check_.realized_lo, r);
    check_.realized_hi = std::max(check_.realized_hi, r);
    if (!(z >= 0.0 && z <= branch)) check_.sandwich_holds = false;
    ++check_.samples;
    return false;
}

EnvelopeCheck OuterEnvelopeObserver::result() const {
    EnvelopeCheck out = check_;
    out.passed = out.samples > 0 && out.realized_lo > 0.0 && out.realized_hi <= K_ &&
                 std::isfinite(out.realized_hi);
    return out;
}

EnvelopeCheck outer_envelope(const Trajectory& traj, const TheoryConstants& consts,
                             const SlowPassageParams& params) {
    require_admissible_ratio(consts, params);
    if (!consts.m1) throw UsageError("outer window is empty for these parameters");
    if (traj.final.m < *consts.m1) {
        throw UsageError("trajectory ends before m1 = " + std::to_string(*consts.m1));
    }
    OuterEnvelopeObserver obs(consts, params);
    for (const Sample& s : traj.samples) {
        if (obs(s)) break;
    }
    EnvelopeCheck check = obs.result();
    if (check.samples == 0) throw UsageError("no stored sample inside the outer window");
    return check;
}

// ---------------------------------------------------------------------------

double corner_ratio_bound(const TheoryConstants& consts, const SlowPassageParams& params) {
    if (!consts.m1) throw PreconditionError("outer window is empty; corner entry undefined");
    const double e23 = std::cbrt(params.epsilon * params.epsilon);
    const double c1_star = -time_of(*consts.m1, params) / e23;
    return (c1_star + std::sqrt(c1_star)) / (2.0 * consts.K * std::cbrt(params.epsilon));
}

CornerObserver::CornerObserver(const TheoryConstants& consts, const SlowPassageParams& params)
    : params_(params), e13_(std::cbrt(params.epsilon)), e23_(e13_ * e13_), m0_(consts.m0) {
    if (!consts.m1) throw PreconditionError("outer window is empty; corner entry undefined");
    report_.m1 = *consts.m1;
    report_.corner_envelope.window = EnvelopeWindow::Corner;
}

bool CornerObserver::operator()(const Sample& s) {
    if (complete_) return true;
    const bool tips = s.x < -stable_branch(s.t);
    if (s.m < report_.m1) {
        if (tips) {
            throw PreconditionError("trajectory tips at m=" + std::to_string(s.m) +
                                    " before the corner entry m1=" + std::to_string(report_.m1));
        }
        return false;
    }
    const double y = s.x / e13_;
    if (!entered_) {
        entered_ = true;
        report_.c1_star = -s.t / e23_;
        report_.K_star = y;
        report_.y_min = report_.y_max = y;
        prev_y_ = y;
    } else if (!exited_) {
        if (y < 0.0) {
            exited_ = true;
            report_.m2 = s.m - 1;
            report_.c2 = time_of(report_.m2, params_) / e23_;
        } else {
            if (!(y < prev_y_)) report_.decreasing = false;
            report_.y_min = std::min(report_.y_min, y);
            report_.y_max = std::max(report_.y_max, y);
            prev_y_ = y;
        }
    }
    if (!exited_ && s.m <= m0_ && !(y > 0.0)) report_.positive_to_m0 = false;
    if (tips) {
        report_.tipped = true;
        report_.m_star = s.m;
        report_.tipping_ratio = s.t / e23_;
    }
    complete_ = exited_ && report_.tipped;
    return complete_;
}

CornerReport CornerObserver::result() const {
    CornerReport out = report_;
    out.corner_envelope.realized_lo = out.y_min;
    out.corner_envelope.realized_hi = out.y_max;
    out.corner_envelope.samples = exited_ ? out.m2 - out.m1 + 1 : 0;
    out.corner_envelope.passed = complete_ && out.y_min > 0.0 && std::isfinite(out.y_max);
    return out;
}

namespace {

// Admits dt/eps == delta0, up to rounding.
void require_corner_hypotheses(const TheoryConstants& consts, const SlowPassageParams& params) {
    if (!(params.ratio() <= consts.delta0 * (1.0 + 1e-12))) require_admissible_ratio(consts, params);
    const double bound = corner_ratio_bound(consts, params);
    if (!(params.ratio() < bound)) {
        throw PreconditionError("dt/eps = " + std::to_string(params.ratio()) +
                                " violates the corner bound " + std::to_string(bound));
    }
}

} // namespace

CornerReport corner_analysis(const Trajectory& traj, const TheoryConstants& consts,
                             const SlowPassageParams& params) {
    require_corner_hypotheses(consts, params);
    if (traj.stride != 1) throw UsageError("corner analysis needs a unit-stride trajectory");
    CornerObserver obs(consts, params);
    for (const Sample& s : traj.samples) {
        if (obs(s)) break;
    }
    if (!obs.complete()) throw UsageError("trajectory ends before leaving the corner layer");
    return obs.result();
}

CornerReport corner_analysis(const SlowPassageParams& params, const StopRule& stop) {
    const TheoryConstants consts = constants(params);
    require_corner_hypotheses(consts, params);
    CornerObserver obs(consts, params);
    run_observed(MapKind::QuadraticSaddleNode, params, stop, obs);
    if (!obs.complete()) throw UsageError("step cap reached before leaving the corner layer");
    return obs.result();
}

// ---------------------------------------------------------------------------

double xi_function(double y, double epsilon, const XiParams& xp, const QuadratureOptions& quad) {
    if (!(epsilon > 0.0) || !(xp.y0 < 0.0) || !(xp.xi0 > 0.0) || !(xp.c > 0.0) ||
        !(xp.p > 0.0) || !(xp.q > 0.0)) {
        throw DomainError("xi_function needs eps, xi0, c, p, q > 0 and y0 < 0");
    }
    const double y_hi = -std::pow(epsilon, 1.0 / (xp.p + 1.0));
    if (!(y >= xp.y0 && y <= y_hi)) {
        throw DomainError("y = " + std::to_string(y) + " outside [" + std::to_string(xp.y0) +
                          ", " + std::to_string(y_hi) + "]");
    }
    const double a = std::pow(std::abs(y), xp.p + 1.0);
    const double a0 = std::pow(std::abs(xp.y0), xp.p + 1.0);
    const double boundary_term = epsilon * xp.xi0 * std::exp(xp.c * (a - a0) / epsilon);
    if (y == xp.y0) return boundary_term;

    // |u| >= |y| on [y0, y], so the folded exponent is never positive.
    auto integrand = [&](double u) {
        const double au = std::abs(u);
        return std::pow(au, xp.q - 1.0) * std::exp(xp.c * (a - std::pow(au, xp.p + 1.0)) / epsilon);
    };

    // The integrand decays on the scale w away from u = y; integrate over
    // geometrically growing pieces [y - 2w, y - w], [y - w, y], ...
    const double w = epsilon / (xp.c * (xp.p + 1.0) * std::pow(std::abs(y), xp.p));
    std::vector<double> cuts{y};
    for (double d = w; y - d > xp.y0; d *= 2.0) cuts.push_back(y - d);
    cuts.push_back(xp.y0);

    double integral = 0.0;
    for (std::size_t i = cuts.size() - 1; i > 0; --i) {
        integral += integrate_adaptive(integrand, cuts[i], cuts[i - 1], quad).value;
    }
    return boundary_term + integral;
}

} // namespace slowpass

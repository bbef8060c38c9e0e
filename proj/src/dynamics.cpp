#include "slowpass/dynamics.hpp"

#include <string>

namespace slowpass {

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw DomainError(std::string(what) + " must be finite");
    }
}

} // namespace

void SlowPassageParams::validate() const {
    require_finite(epsilon, "epsilon");
    require_finite(dt, "dt");
    require_finite(t0, "t0");
    require_finite(alpha, "alpha");
    require_finite(x0, "x0");
    if (epsilon <= 0.0) throw DomainError("epsilon must be positive");
    if (dt <= 0.0) throw DomainError("dt must be positive");
    if (t0 >= 0.0) throw DomainError("t0 must be negative");
    if (alpha <= 0.0) throw DomainError("alpha must be positive");
}

SlowPassageParams make_quadratic_params(double epsilon, double dt, double t0, double alpha) {
    SlowPassageParams p;
    p.epsilon = epsilon;
    p.dt = dt;
    p.t0 = t0;
    p.alpha = alpha;
    p.x0 = std::sqrt(-t0) + alpha * epsilon;
    p.validate();
    return p;
}

SlowPassageParams make_cubic_params(double epsilon, double dt, double t0, double x0) {
    SlowPassageParams p;
    p.epsilon = epsilon;
    p.dt = dt;
    p.t0 = t0;
    p.alpha = 1.0;
    p.x0 = x0;
    p.validate();
    return p;
}

std::string_view to_string(MapKind kind) {
    switch (kind) {
    case MapKind::QuadraticSaddleNode: return "quadratic";
    case MapKind::CubicBistable: return "cubic";
    }
    return "?";
}

std::string_view to_string(StopReason reason) {
    switch (reason) {
    case StopReason::ReachedStepCap: return "ReachedStepCap";
    case StopReason::BelowFloor: return "BelowFloor";
    case StopReason::UserPredicate: return "UserPredicate";
    }
    return "?";
}

double step_quadratic(double x, double t, double ratio) {
    require_finite(x, "x");
    require_finite(t, "t");
    require_finite(ratio, "ratio");
    if (ratio <= 0.0) throw DomainError("ratio must be positive");
    return detail::step_quadratic_unchecked(x, t, ratio);
}

double step_cubic(double y, double t, double ratio) {
    require_finite(y, "y");
    require_finite(t, "t");
    require_finite(ratio, "ratio");
    if (ratio <= 0.0) throw DomainError("ratio must be positive");
    return detail::step_cubic_unchecked(y, t, ratio);
}

CornerCoordinates to_corner(double x, double t, double dt, double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw DomainError("corner rescaling needs a positive finite epsilon");
    }
    const double e13 = std::cbrt(epsilon);
    const double e23 = e13 * e13;
    return {x / e13, t / e23, dt / e23};
}

PhysicalCoordinates from_corner(const CornerCoordinates& c, double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw DomainError("corner rescaling needs a positive finite epsilon");
    }
    const double e13 = std::cbrt(epsilon);
    const double e23 = e13 * e13;
    return {c.y * e13, c.s * e23, c.ds * e23};
}

namespace detail {

SampleStore::SampleStore(const SamplingPolicy& policy)
    : store_(policy.store), capacity_(policy.max_stored < 2 ? 2 : policy.max_stored) {
    if (store_) samples_.reserve(std::min<std::size_t>(capacity_, 4096));
}

void SampleStore::push(const Sample& s) {
    if (samples_.size() == capacity_) {
        // Keep even positions; stride doubles and indices stay multiples of it.
        std::size_t w = 0;
        for (std::size_t r = 0; r < samples_.size(); r += 2) samples_[w++] = samples_[r];
        samples_.resize(w);
        stride_ *= 2;
        if ((s.m & (stride_ - 1)) != 0) return;
    }
    samples_.push_back(s);
}

Trajectory SampleStore::finish(StopReason reason, const Sample& last) && {
    Trajectory tr;
    tr.samples = std::move(samples_);
    tr.stride = stride_;
    tr.stop_reason = reason;
    tr.final = last;
    return tr;
}

} // namespace detail

} // namespace slowpass

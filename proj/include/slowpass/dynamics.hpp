#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "slowpass/errors.hpp"

namespace slowpass {

/// Problem instance in rescaled time t = eps * tau.
///
/// For the quadratic model x0 = sqrt(-t0) + alpha * eps. The cubic model
/// supplies x0 directly (see make_cubic_params); alpha is then unused.
struct SlowPassageParams {
    double epsilon = 0.0;
    double dt = 0.0;
    double t0 = -1.0;
    double alpha = 1.0;
    double x0 = 0.0;

    double ratio() const { return dt / epsilon; }

    /// Throws DomainError unless epsilon > 0, dt > 0, t0 < 0, alpha > 0
    /// and every field is finite.
    void validate() const;
};

SlowPassageParams make_quadratic_params(double epsilon, double dt, double t0 = -1.0,
                                        double alpha = 1.0);
SlowPassageParams make_cubic_params(double epsilon, double dt, double t0, double x0);

enum class MapKind { QuadraticSaddleNode, CubicBistable };

std::string_view to_string(MapKind kind);

struct Sample {
    std::uint64_t m = 0;
    double t = 0.0;
    double x = 0.0;
};

enum class StopReason {
    ReachedStepCap,  ///< step cap or time horizon reached
    BelowFloor,      ///< x fell below the divergence floor or overflowed
    UserPredicate,   ///< an observer asked to stop
};

std::string_view to_string(StopReason reason);

struct StopRule {
    std::uint64_t step_cap = 100'000'000;
    double x_floor = -1.0e6;
    std::optional<double> t_max;
};

/// Storage policy for simulate(). Samples are kept with a uniform stride;
/// when the store fills up every other sample is dropped and the stride
/// doubles.
struct SamplingPolicy {
    std::size_t max_stored = 1'000'000;
    bool store = true;
};

struct Trajectory {
    std::vector<Sample> samples;
    std::uint64_t stride = 1;
    StopReason stop_reason = StopReason::ReachedStepCap;
    Sample final;  ///< last state visited, stored or not
};

// ---------------------------------------------------------------------------
// Maps

/// One forward-Euler step of the saddle-node normal form,
/// x -> -ratio*x^2 + x - ratio*t.
double step_quadratic(double x, double t, double ratio);

/// One forward-Euler step of the bistable cubic,
/// y -> ratio*(y - y^3/3) + y - ratio*t.
double step_cubic(double y, double t, double ratio);

namespace detail {
inline double step_quadratic_unchecked(double x, double t, double ratio) {
    return -ratio * x * x + x - ratio * t;
}
inline double step_cubic_unchecked(double y, double t, double ratio) {
    return ratio * (y - y * y * y / 3.0) + y - ratio * t;
}
inline double apply_map(MapKind kind, double x, double t, double ratio) {
    return kind == MapKind::QuadraticSaddleNode ? step_quadratic_unchecked(x, t, ratio)
                                                : step_cubic_unchecked(x, t, ratio);
}
} // namespace detail

/// t_m = t0 + m*dt, always recomputed from m.
inline double time_of(std::uint64_t m, double t0, double dt) {
    return t0 + static_cast<double>(m) * dt;
}
inline double time_of(std::uint64_t m, const SlowPassageParams& params) {
    return time_of(m, params.t0, params.dt);
}

inline double stable_branch(double t) { return std::sqrt(std::max(-t, 0.0)); }
inline double unstable_branch(double t) { return -std::sqrt(std::max(-t, 0.0)); }

// ---------------------------------------------------------------------------
// Corner-layer coordinates: x = eps^{1/3} y, t = eps^{2/3} s, dt = eps^{2/3} ds.

struct CornerCoordinates {
    double y = 0.0;
    double s = 0.0;
    double ds = 0.0;
};

CornerCoordinates to_corner(double x, double t, double dt, double epsilon);

struct PhysicalCoordinates {
    double x = 0.0;
    double t = 0.0;
    double dt = 0.0;
};

PhysicalCoordinates from_corner(const CornerCoordinates& c, double epsilon);

// ---------------------------------------------------------------------------
// Trajectory engine

/// Observer that never stops the run.
struct NoObserver {
    constexpr bool operator()(const Sample&) const noexcept { return false; }
};

namespace detail {

class SampleStore {
public:
    explicit SampleStore(const SamplingPolicy& policy);
    void offer(const Sample& s) {
        if (store_ && (s.m & (stride_ - 1)) == 0) push(s);
    }
    Trajectory finish(StopReason reason, const Sample& last) &&;

private:
    void push(const Sample& s);

    bool store_;
    std::size_t capacity_;
    std::uint64_t stride_ = 1;  // power of two
    std::vector<Sample> samples_;
};

} // namespace detail

/// Iterate the chosen map from (0, t0, x0).
///
/// At every index the sample is first shown to the observer (which may stop
/// the run with UserPredicate), then the divergence floor, the time horizon
/// and the step cap are checked, and only then the map is applied. With
/// step_cap == 0 the trajectory holds the initial sample only.
template <class Observer>
Trajectory simulate(MapKind kind, const SlowPassageParams& params, const StopRule& stop,
                    const SamplingPolicy& sampling, Observer&& observer) {
    params.validate();
    const double ratio = params.ratio();
    const double t_max = stop.t_max.value_or(INFINITY);

    detail::SampleStore store(sampling);
    Sample s{0, params.t0, params.x0};
    for (;;) {
        s.t = time_of(s.m, params);
        store.offer(s);
        if (observer(static_cast<const Sample&>(s))) {
            return std::move(store).finish(StopReason::UserPredicate, s);
        }
        if (!std::isfinite(s.x) || s.x < stop.x_floor) {
            return std::move(store).finish(StopReason::BelowFloor, s);
        }
        if (s.m >= stop.step_cap || s.t >= t_max) {
            return std::move(store).finish(StopReason::ReachedStepCap, s);
        }
        s.x = detail::apply_map(kind, s.x, s.t, ratio);
        ++s.m;
    }
}

inline Trajectory simulate(MapKind kind, const SlowPassageParams& params, const StopRule& stop,
                           const SamplingPolicy& sampling = {}) {
    return simulate(kind, params, stop, sampling, NoObserver{});
}

/// Same stepping rules as simulate() without any storage.
template <class Observer>
Sample run_observed(MapKind kind, const SlowPassageParams& params, const StopRule& stop,
                    Observer&& observer, StopReason* reason = nullptr) {
    SamplingPolicy none;
    none.store = false;
    Trajectory tr = simulate(kind, params, stop, none, std::forward<Observer>(observer));
    if (reason) *reason = tr.stop_reason;
    return tr.final;
}

} // namespace slowpass

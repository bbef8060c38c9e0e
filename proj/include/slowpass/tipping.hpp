#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>

#include "slowpass/dynamics.hpp"

namespace slowpass {

struct TippingReport {
    bool found = false;
    std::uint64_t m_star = 0;
    double t_star = std::numeric_limits<double>::quiet_NaN();
    double x_star = std::numeric_limits<double>::quiet_NaN();
    /// Indices m < m_star with x(m) strictly below the stable branch.
    std::uint64_t crossings_before = 0;
    /// x(m) > 0 and (-1)^m (x(m) - sqrt(max(-t_m,0))) > 0 for every m < m_star
    /// (every observed m when not found).
    bool oscillating = true;
};

enum class SolutionClass { TypeI, TypeII, TypeIII, Unclassified };

std::string_view to_string(SolutionClass c);

/// Online tipping detector for one trajectory. Samples must arrive in index
/// order starting at m = 0.
class TippingDetector {
public:
    /// Returns true exactly when this sample is the tipping point.
    bool observe(std::uint64_t m, double t, double x);
    bool observe(const Sample& s) { return observe(s.m, s.t, s.x); }

    bool done() const { return report_.found; }
    const TippingReport& report() const { return report_; }

private:
    std::uint64_t next_m_ = 0;
    TippingReport report_;
};

/// Observer adaptor: stops the trajectory engine at the tipping point.
struct StopAtTipping {
    TippingDetector& detector;
    bool operator()(const Sample& s) { return detector.observe(s); }
};

TippingReport detect_tipping(std::span<const Sample> samples);

/// Simulate the quadratic model up to (and including) the tipping point.
TippingReport find_tipping(const SlowPassageParams& params, const StopRule& stop = {});

/// Sign-of-t_star classification; crossings_before separates I from II.
SolutionClass classify(const TippingReport& report);

/// Membership in the negative-tipping region Omega_m: tipping at index m,
/// at negative time, after an alternating approach to the stable branch.
bool in_negative_tipping_region(const TippingReport& report, std::uint64_t m);

/// True when dt > 1/alpha; the first iterate is then already the tipping point.
bool lemma41_predicts_tipping_at_1(const SlowPassageParams& params);

/// Hypotheses for tipping at m = 3 with dt = C eps^b: 0 < b < 1/2 and
/// alpha > 1/(-4 t0).
bool lemma42_applicable(const SlowPassageParams& params, double C, double b);

/// Strict upper bound on dt for negative tipping at index M: -t0/M.
double lemma43_dt_bound(std::uint64_t M, double t0);

} // namespace slowpass

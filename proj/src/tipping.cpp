#include "slowpass/tipping.hpp"

#include <string>

namespace slowpass {

std::string_view to_string(SolutionClass c) {
    switch (c) {
    case SolutionClass::TypeI: return "TypeI";
    case SolutionClass::TypeII: return "TypeII";
    case SolutionClass::TypeIII: return "TypeIII";
    case SolutionClass::Unclassified: return "Unclassified";
    }
    return "?";
}

bool TippingDetector::observe(std::uint64_t m, double t, double x) {
    if (report_.found) {
        throw UsageError("tipping detector already fired");
    }
    if (m != next_m_) {
        throw UsageError("samples out of order: expected m=" + std::to_string(next_m_) +
                         ", got m=" + std::to_string(m));
    }
    ++next_m_;

    const double branch = stable_branch(t);
    if (x < -branch) {
        report_.found = true;
        report_.m_star = m;
        report_.t_star = t;
        report_.x_star = x;
        return true;
    }
    if (x < branch) ++report_.crossings_before;
    if (report_.oscillating) {
        const double z = x - branch;
        const bool sign_ok = ((m & 1u) == 0) ? z > 0.0 : z < 0.0;
        report_.oscillating = x > 0.0 && sign_ok;
    }
    return false;
}

TippingReport detect_tipping(std::span<const Sample> samples) {
    TippingDetector det;
    for (const Sample& s : samples) {
        if (det.observe(s)) break;
    }
    return det.report();
}

TippingReport find_tipping(const SlowPassageParams& params, const StopRule& stop) {
    TippingDetector det;
    run_observed(MapKind::QuadraticSaddleNode, params, stop, StopAtTipping{det});
    return det.report();
}

SolutionClass classify(const TippingReport& report) {
    if (!report.found) {
        throw UsageError("cannot classify a trajectory without a tipping point");
    }
    if (report.t_star < 0.0) return SolutionClass::TypeIII;
    if (report.t_star > 0.0) {
        return report.crossings_before == 0 ? SolutionClass::TypeI : SolutionClass::TypeII;
    }
    return SolutionClass::Unclassified;
}

bool in_negative_tipping_region(const TippingReport& report, std::uint64_t m) {
    return report.found && report.m_star == m && report.t_star < 0.0 && report.oscillating;
}

bool lemma41_predicts_tipping_at_1(const SlowPassageParams& params) {
    return params.dt > 1.0 / params.alpha;
}

bool lemma42_applicable(const SlowPassageParams& params, double /*C*/, double b) {
    if (!(params.t0 < 0.0)) throw DomainError("t0 must be negative");
    return b > 0.0 && b < 0.5 && params.alpha > 1.0 / (-4.0 * params.t0);
}

double lemma43_dt_bound(std::uint64_t M, double t0) {
    return -t0 / static_cast<double>(M);
}

} // namespace slowpass

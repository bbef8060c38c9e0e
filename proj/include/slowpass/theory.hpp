#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>

#include "slowpass/dynamics.hpp"
#include "slowpass/quadrature.hpp"

namespace slowpass {

/// Constants of the slow-passage envelope theorem for the quadratic model.
struct TheoryConstants {
    double delta0 = 0.0;  ///< admissible bound on dt/eps
    double K = 0.0;       ///< explicit upper envelope constant alpha|t0| + 1/4
    double c1 = 0.0;      ///< K^{2/3}; outer window ends at -c1 eps^{2/3}
    std::uint64_t m0 = 0; ///< last index with t_m <= 0
    /// Last index with t_m <= -c1 eps^{2/3}; empty when t0 is already past it.
    std::optional<std::uint64_t> m1;
};

TheoryConstants constants(const SlowPassageParams& params);

enum class EnvelopeWindow { Outer, Corner };

std::string_view to_string(EnvelopeWindow w);

struct EnvelopeCheck {
    EnvelopeWindow window = EnvelopeWindow::Outer;
    double realized_lo = std::numeric_limits<double>::infinity();
    double realized_hi = -std::numeric_limits<double>::infinity();
    std::uint64_t samples = 0;
    /// 0 <= x - sqrt(-t) <= sqrt(-t) at every sample (outer window only).
    bool sandwich_holds = true;
    bool passed = false;
};

/// Streaming check of the outer-region envelope
///   r(m) = (x(m) - sqrt(-t_m)) |t_m| / eps  on  t0 <= t_m <= -c1 eps^{2/3}.
/// passed requires min r > 0 and max r <= K.
class OuterEnvelopeObserver {
public:
    OuterEnvelopeObserver(const TheoryConstants& consts, const SlowPassageParams& params);
    bool operator()(const Sample& s);
    EnvelopeCheck result() const;

private:
    double epsilon_;
    double t_end_;
    double K_;
    EnvelopeCheck check_;
};

/// Envelope over the stored samples of a trajectory. Throws
/// PreconditionError when dt/eps >= delta0 and UsageError when no sample
/// falls in the window.
EnvelopeCheck outer_envelope(const Trajectory& traj, const TheoryConstants& consts,
                             const SlowPassageParams& params);

struct CornerReport {
    std::uint64_t m1 = 0;
    std::uint64_t m2 = 0;      ///< last index with y(m) >= 0
    double c1_star = 0.0;      ///< -t_{m1} eps^{-2/3}
    double c2 = 0.0;           ///< s_{m2}
    double K_star = 0.0;       ///< y(m1) = x(m1) eps^{-1/3}
    double y_min = 0.0;        ///< min y over m1..m2
    double y_max = 0.0;        ///< max y over m1..m2
    bool decreasing = true;    ///< y strictly decreasing over m1..m2
    bool positive_to_m0 = true;///< y > 0 for m1 <= m <= m0
    bool tipped = false;
    std::uint64_t m_star = 0;
    double tipping_ratio = 0.0;///< t_{m*} eps^{-2/3}
    EnvelopeCheck corner_envelope;  ///< x eps^{-1/3} over m1..m2
};

/// dt/eps bound that keeps the corner sequence decreasing:
/// eps^{-1/3} / [2K / (c1* + sqrt(c1*))].
double corner_ratio_bound(const TheoryConstants& consts, const SlowPassageParams& params);

/// Streaming corner-layer analysis; stops the run one index after y turns
/// negative. Throws PreconditionError if the trajectory tips before m1.
class CornerObserver {
public:
    CornerObserver(const TheoryConstants& consts, const SlowPassageParams& params);
    bool operator()(const Sample& s);
    bool complete() const { return complete_; }
    CornerReport result() const;

private:
    SlowPassageParams params_;
    double e13_;
    double e23_;
    std::uint64_t m0_;
    CornerReport report_;
    bool entered_ = false;
    bool exited_ = false;
    bool complete_ = false;
    double prev_y_ = 0.0;
};

/// Corner analysis over a trajectory stored with unit stride through m2 + 1.
CornerReport corner_analysis(const Trajectory& traj, const TheoryConstants& consts,
                             const SlowPassageParams& params);

/// Run the quadratic model and analyse its corner layer without storing it.
CornerReport corner_analysis(const SlowPassageParams& params, const StopRule& stop = {});

struct XiParams {
    double y0 = -1.0;
    double xi0 = 2.0;
    double c = 4.0;
    double p = 0.5;
    double q = 0.5;
};

/// xi(y, eps) = e^{c|y|^{p+1}/eps} [ eps xi0 e^{-c|y0|^{p+1}/eps}
///                                   + int_{y0}^{y} |u|^{q-1} e^{-c|u|^{p+1}/eps} du ]
/// with the prefactor folded into both terms. Defined for
/// y0 <= y <= -eps^{1/(p+1)}.
double xi_function(double y, double epsilon, const XiParams& xp = {},
                   const QuadratureOptions& quad = {});

} // namespace slowpass

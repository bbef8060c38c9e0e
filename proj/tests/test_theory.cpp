#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "slowpass/errors.hpp"
#include "slowpass/quadrature.hpp"
#include "slowpass/theory.hpp"

using namespace slowpass;

namespace {

const double kLn2Over6 = std::log(2.0) / 6.0;
const double kPi = 3.14159265358979323846;

// n-point Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
struct GaussLegendre {
    std::vector<double> x, w;
    explicit GaussLegendre(int n) : x(n), w(n) {
        for (int i = 0; i < n; ++i) {
            double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = z;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (z * p1 - p0) / (z * z - 1.0);
                const double dz = p1 / dp;
                z -= dz;
                if (std::abs(dz) < 1e-16) break;
            }
            x[i] = z;
            w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
    }
};

// xi by an independent route: with v = |u| and w = c (v^{p+1} - |y|^{p+1}) / eps
// the folded integral becomes eps/(c(p+1)) * int_0^W v(w)^{q-1-p} e^{-w} dw,
// integrated with composite Gauss-Legendre on unit panels.
double xi_oracle(double y, double eps, const XiParams& xp) {
    static const GaussLegendre gl(20);
    const double a = std::pow(-y, xp.p + 1.0);
    const double a0 = std::pow(-xp.y0, xp.p + 1.0);
    const double W = xp.c * (a0 - a) / eps;
    const double top = std::min(W, 80.0);
    auto f = [&](double w) {
        const double v = std::pow(a + eps * w / xp.c, 1.0 / (xp.p + 1.0));
        return std::pow(v, xp.q - 1.0 - xp.p) * std::exp(-w);
    };
    double sum = 0.0;
    const int panels = std::max(1, static_cast<int>(std::ceil(top / 0.25)));
    const double h = top / panels;
    for (int k = 0; k < panels; ++k) {
        const double lo = k * h;
        for (std::size_t i = 0; i < gl.x.size(); ++i) {
            sum += 0.5 * h * gl.w[i] * f(lo + 0.5 * h * (gl.x[i] + 1.0));
        }
    }
    return eps * xp.xi0 * std::exp(-W) + eps / (xp.c * (xp.p + 1.0)) * sum;
}

std::uint64_t brute_last_index(double t0, double dt, double bound) {
    std::uint64_t m = 0;
    while (t0 + static_cast<double>(m + 1) * dt <= bound) ++m;
    return m;
}

} // namespace

TEST_CASE("constants by hand") {
    const auto k = constants(make_quadratic_params(0.01, 0.001));
    CHECK(k.delta0 == doctest::Approx(kLn2Over6));
    CHECK(k.K == 1.25);
    CHECK(k.c1 == doctest::Approx(1.16040).epsilon(1e-5));
    CHECK(k.m0 == 1000);
    REQUIRE(k.m1);
    CHECK(*k.m1 == brute_last_index(-1.0, 0.001, -k.c1 * std::cbrt(1e-4)));

    const auto k4 = constants(make_quadratic_params(0.01, 0.001, -4.0));
    CHECK(k4.delta0 == doctest::Approx(kLn2Over6));
    CHECK(k4.K == 4.25);

    // sqrt(-t0)/2 wins for small |t0|
    const auto ks = constants(make_quadratic_params(0.001, 0.00001, -0.01));
    CHECK(ks.delta0 == doctest::Approx(0.05));

    SlowPassageParams bad = make_quadratic_params(0.01, 0.001);
    bad.t0 = 0.2;
    CHECK_THROWS_AS(constants(bad), DomainError);
}

TEST_CASE("m0 and m1 agree with a brute-force scan") {
    for (double t0 : {-1.0, -0.7, -2.5}) {
        for (double dt : {0.1, 0.013, 0.0007, 1.0 / 3.0}) {
            const auto p = make_quadratic_params(0.02, dt, t0);
            const auto k = constants(p);
            CHECK(k.m0 == brute_last_index(t0, dt, 0.0));
            const double bound = -k.c1 * std::cbrt(0.02 * 0.02);
            if (t0 <= bound) {
                REQUIRE(k.m1);
                CHECK(*k.m1 == brute_last_index(t0, dt, bound));
            } else {
                CHECK_FALSE(k.m1);
            }
        }
    }
}

TEST_CASE("outer envelope") {
    for (double eps : {1e-2, 1e-3}) {
        for (double ratio : {std::log(2.0) / 12.0, 0.9 * kLn2Over6}) {
            const auto p = make_quadratic_params(eps, ratio * eps);
            const auto k = constants(p);
            StopRule stop;
            stop.t_max = 0.0;
            const Trajectory tr = simulate(MapKind::QuadraticSaddleNode, p, stop);
            const EnvelopeCheck c = outer_envelope(tr, k, p);
            CHECK(c.passed);
            CHECK(c.sandwich_holds);
            CHECK(c.realized_lo > 0.0);
            CHECK(c.realized_hi <= k.K);
            const double r0 = (p.x0 - 1.0) / eps;  // alpha |t0| up to rounding
            CHECK(r0 == doctest::Approx(1.0));
            CHECK(c.realized_lo <= r0);
            CHECK(c.realized_hi >= r0);
            CHECK(c.samples == *k.m1 + 1);

            // streaming gives the same answer
            OuterEnvelopeObserver obs(k, p);
            run_observed(MapKind::QuadraticSaddleNode, p, StopRule{}, obs);
            const EnvelopeCheck s = obs.result();
            CHECK(s.realized_lo == c.realized_lo);
            CHECK(s.realized_hi == c.realized_hi);
            CHECK(s.samples == c.samples);
        }
    }
}

TEST_CASE("outer envelope failures") {
    const auto p = make_quadratic_params(0.01, 0.0005);
    const auto k = constants(p);
    StopRule stop;
    stop.t_max = 0.0;
    Trajectory tr = simulate(MapKind::QuadraticSaddleNode, p, stop);

    Trajectory broken = tr;
    broken.samples[40].x = std::sqrt(-broken.samples[40].t) - 1e-9;
    const EnvelopeCheck c = outer_envelope(broken, k, p);
    CHECK_FALSE(c.passed);
    CHECK_FALSE(c.sandwich_holds);

    const auto fast = make_quadratic_params(0.01, 0.002);
    CHECK_THROWS_AS(outer_envelope(tr, constants(fast), fast), PreconditionError);

    StopRule shortstop;
    shortstop.step_cap = 10;
    const Trajectory shorty = simulate(MapKind::QuadraticSaddleNode, p, shortstop);
    CHECK_THROWS_AS(outer_envelope(shorty, k, p), UsageError);

    const auto late = make_quadratic_params(0.1, 0.001, -0.1);
    const Trajectory tl = simulate(MapKind::QuadraticSaddleNode, late, stop);
    CHECK_THROWS_AS(outer_envelope(tl, constants(late), late), UsageError);
}

TEST_CASE("corner layer at the tabulated ratio") {
    const auto p = make_quadratic_params(1e-3, kLn2Over6 * 1e-3);
    const CornerReport r = corner_analysis(p);
    CHECK(r.c2 == doctest::Approx(1.02).epsilon(0.02));
    CHECK(r.tipping_ratio == doctest::Approx(1.0262).epsilon(0.005));
    CHECK(r.decreasing);
    CHECK(r.positive_to_m0);
    CHECK(r.K_star > 0.0);
    CHECK(r.y_min > 0.0);
    CHECK(r.y_max == r.K_star);
    CHECK(r.m2 + 1 == r.m_star);
    CHECK(r.c1_star >= constants(p).c1);
    CHECK(r.corner_envelope.passed);

    // the same from a stored trajectory
    const Trajectory tr = simulate(MapKind::QuadraticSaddleNode, p, StopRule{});
    const CornerReport q = corner_analysis(tr, constants(p), p);
    CHECK(q.m2 == r.m2);
    CHECK(q.c2 == r.c2);
    CHECK(q.K_star == r.K_star);
}

TEST_CASE("corner constant with dt = C eps^2.5") {
    const double eps = 1e-2;
    const auto p = make_quadratic_params(eps, kLn2Over6 * std::pow(eps, 2.5));
    const CornerReport r = corner_analysis(p);
    CHECK(r.c2 == doctest::Approx(1.0188).epsilon(0.002 / 1.0188));
    CHECK(r.tipping_ratio == doctest::Approx(1.0188).epsilon(0.002 / 1.0188));
}

TEST_CASE("corner constant is stable across eps") {
    std::vector<double> c2, ratio;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        const CornerReport r = corner_analysis(make_quadratic_params(eps, kLn2Over6 * eps));
        c2.push_back(r.c2);
        ratio.push_back(r.tipping_ratio);
        CHECK(r.decreasing);
        CHECK(r.positive_to_m0);
    }
    auto spread = [](const std::vector<double>& v) {
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        double mean = 0.0;
        for (double x : v) mean += x;
        return (*hi - *lo) / (mean / v.size());
    };
    CHECK(spread(c2) < 0.05);
    CHECK(spread(ratio) < 0.05);
}

TEST_CASE("corner preconditions") {
    CHECK_THROWS_AS(corner_analysis(make_quadratic_params(0.01, 0.005)), PreconditionError);
    const auto p = make_quadratic_params(0.01, 0.001);
    SamplingPolicy sp;
    sp.max_stored = 64;
    const Trajectory coarse = simulate(MapKind::QuadraticSaddleNode, p, StopRule{}, sp);
    CHECK_THROWS_AS(corner_analysis(coarse, constants(p), p), UsageError);
    // m1 is absent when t0 is already inside the corner
    CHECK_THROWS_AS(corner_analysis(make_quadratic_params(0.1, 0.001, -0.05)), PreconditionError);
}

TEST_CASE("corner ratio bound") {
    const auto p = make_quadratic_params(0.01, 0.001);
    const auto k = constants(p);
    const double c1s = -time_of(*k.m1, p) / std::cbrt(1e-4);
    CHECK(corner_ratio_bound(k, p) ==
          doctest::Approx((c1s + std::sqrt(c1s)) / (2.0 * 1.25 * std::cbrt(0.01))));
}

TEST_CASE("quadrature on known integrals") {
    auto r = integrate_adaptive([](double x) { return std::sin(x); }, 0.0, kPi);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-13));
    r = integrate_adaptive([](double x) { return std::exp(-x); }, 3.0, 0.0);
    CHECK(r.value == doctest::Approx(-(1.0 - std::exp(-3.0))).epsilon(1e-13));
    r = integrate_adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-9));
    r = integrate_adaptive([](double) { return 1.0; }, 2.0, 2.0);
    CHECK(r.value == 0.0);
}

TEST_CASE("xi at the left end") {
    const XiParams xp;
    for (double eps : {0.1, 0.01, 1e-4}) {
        CHECK(xi_function(xp.y0, eps, xp) == eps * xp.xi0);
    }
}

TEST_CASE("xi matches the Gauss-Legendre oracle") {
    const XiParams xp;
    for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
        const double y_hi = -std::pow(eps, 1.0 / (xp.p + 1.0));
        for (double y : {-0.95, -0.5, -0.3, 0.5 * (y_hi - 0.9), y_hi}) {
            if (y > y_hi || y < xp.y0) continue;
            const double got = xi_function(y, eps, xp);
            CHECK(got == doctest::Approx(xi_oracle(y, eps, xp)).epsilon(1e-8));
        }
    }
    XiParams other;
    other.p = 1.0;
    other.q = 2.0;
    other.c = 1.5;
    other.y0 = -2.0;
    other.xi0 = 0.5;
    for (double y : {-1.9, -1.0, -0.2}) {
        CHECK(xi_function(y, 0.01, other) == doctest::Approx(xi_oracle(y, 0.01, other)).epsilon(1e-8));
    }
}

TEST_CASE("xi scales like eps/|y|") {
    const XiParams xp;
    const double v = xi_function(-0.3, 0.01, xp);
    CHECK(v > 0.1 * 0.01 / 0.3);
    CHECK(v < 10.0 * 0.01 / 0.3);

    double lo = INFINITY, hi = -INFINITY;
    for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
        const double s = xi_function(-0.5, eps, xp) * 0.5 / eps;
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    CHECK(lo > 0.1);
    CHECK(hi < 10.0);
}

TEST_CASE("xi is resolution independent") {
    const XiParams xp;
    QuadratureOptions fine;
    fine.initial_panels = 16;
    fine.rel_tol = 1e-12;
    for (double eps : {1e-2, 1e-4}) {
        for (double y : {-0.9, -0.4, -0.1}) {
            if (y > -std::pow(eps, 2.0 / 3.0)) continue;
            const double a = xi_function(y, eps, xp);
            const double b = xi_function(y, eps, xp, fine);
            CHECK(std::abs(a - b) <= 1e-8 * std::abs(b));
        }
    }
}

TEST_CASE("xi domain") {
    const XiParams xp;
    CHECK_THROWS_AS(xi_function(-1.5, 0.01, xp), DomainError);
    CHECK_THROWS_AS(xi_function(-0.01, 0.01, xp), DomainError);
    CHECK_THROWS_AS(xi_function(-0.5, 0.0, xp), DomainError);
    XiParams bad;
    bad.c = -1.0;
    CHECK_THROWS_AS(xi_function(-0.5, 0.01, bad), DomainError);
}

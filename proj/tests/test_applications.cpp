#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "slowpass/applications.hpp"
#include "slowpass/errors.hpp"
#include "slowpass/fitting.hpp"

using namespace slowpass;

namespace {
const double kLn2Over6 = std::log(2.0) / 6.0;
double residual(double y, double p) { return std::abs(y - y * y * y / 3.0 - p); }
} // namespace

TEST_CASE("equilibria at named parameters") {
    const auto a = cubic_equilibria(-1.0);
    REQUIRE(a.roots.size() == 1);
    CHECK(a.roots[0].label == RootLabel::UpperStable);
    CHECK(a.roots[0].y == doctest::Approx(2.1038).epsilon(5e-4 / 2.1038));

    const auto b = cubic_equilibria(0.0);
    REQUIRE(b.roots.size() == 3);
    CHECK(b.roots[0].y == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
    CHECK(std::abs(b.roots[1].y) < 1e-15);
    CHECK(b.roots[2].y == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-14));
    CHECK(b.roots[0].label == RootLabel::UpperStable);
    CHECK(b.roots[1].label == RootLabel::Unstable);
    CHECK(b.roots[2].label == RootLabel::LowerStable);

    const auto c = cubic_equilibria(2.0 / 3.0);
    REQUIRE(c.roots.size() == 2);
    CHECK(c.roots[0].label == RootLabel::Fold);
    CHECK(std::abs(c.roots[0].y - 1.0) < 1e-9);
    CHECK(c.roots[1].y == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(c.find(RootLabel::LowerStable));
    CHECK_FALSE(c.find(RootLabel::UpperStable));

    const auto d = cubic_equilibria(-2.0 / 3.0);
    REQUIRE(d.roots.size() == 2);
    CHECK(d.roots[0].y == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(d.roots[1].label == RootLabel::Fold);

    CHECK_THROWS_AS(cubic_equilibria(NAN), DomainError);
}

TEST_CASE("root properties over many p") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    std::vector<double> ps = {0.6666, 0.66667, -0.6666, 1e-300, 0.999, 4.9};
    for (int i = 0; i < 400; ++i) ps.push_back(u(rng));
    for (double p : ps) {
        const auto e = cubic_equilibria(p);
        const auto m = cubic_equilibria(-p);
        REQUIRE(e.roots.size() == m.roots.size());
        CHECK(e.roots.size() == (std::abs(p) < 2.0 / 3.0 ? 3u : 1u));
        for (std::size_t i = 0; i < e.roots.size(); ++i) {
            const auto& r = e.roots[i];
            CHECK(residual(r.y, p) < 1e-12);
            if (i > 0) CHECK(r.y < e.roots[i - 1].y);
            switch (r.label) {
            case RootLabel::UpperStable: CHECK(r.y > 1.0); break;
            case RootLabel::Unstable: CHECK((r.y > -1.0 && r.y < 1.0)); break;
            case RootLabel::LowerStable: CHECK(r.y < -1.0); break;
            case RootLabel::Fold: CHECK(false); break;
            }
            // odd symmetry
            const auto& mr = m.roots[m.roots.size() - 1 - i];
            CHECK(mr.y == doctest::Approx(-r.y).epsilon(1e-12));
        }
    }
}

TEST_CASE("switch threshold") {
    CHECK_FALSE(below_switch_threshold(0.0, -0.9));  // only the upper branch exists
    CHECK(below_switch_threshold(-0.1, 0.0));        // middle root at t = 0 is 0
    CHECK_FALSE(below_switch_threshold(0.1, 0.0));
    CHECK(below_switch_threshold(0.99, 0.7));
    CHECK_FALSE(below_switch_threshold(1.01, 0.7));
    CHECK_FALSE(below_switch_threshold(1.5, 0.5));
}

TEST_CASE("start of the bistable sweep") {
    CHECK(bistable_start(-1.0) == doctest::Approx(2.103803402735535).epsilon(1e-14));
    CHECK_THROWS_AS(bistable_start(1.0), DomainError);
}

TEST_CASE("delayed switch matches a brute-force scan") {
    const double eps = 0.01;
    const DelayResult d = bistable_delay(eps, kLn2Over6 * eps);
    REQUIRE(d.switched);
    CHECK(d.delta_T > 0.0);
    CHECK(d.delta_T == d.t_switch - 2.0 / 3.0);
    CHECK(d.warning.empty());

    const Trajectory tr = simulate_bistable(eps, kLn2Over6 * eps, 1.0);
    REQUIRE(tr.stride == 1);
    std::uint64_t first = 0;
    for (const auto& s : tr.samples) {
        double thr = -INFINITY;
        if (s.t >= 2.0 / 3.0) thr = 1.0;
        else if (s.t > -2.0 / 3.0) thr = *cubic_equilibria(s.t).find(RootLabel::Unstable);
        if (s.x < thr) {
            first = s.m;
            break;
        }
    }
    CHECK(first == d.m_switch);
}

TEST_CASE("delay is positive and scales like eps^(2/3)") {
    for (double eps : {0.05, 0.02, 0.01, 0.005, 0.001}) {
        const DelayResult d = bistable_delay(eps, kLn2Over6 * eps);
        REQUIRE(d.switched);
        CHECK(d.delta_T > 0.0);
    }
    std::vector<XY> pts;
    for (double eps : {0.01, 0.01 * std::pow(2.0, 1.5), 0.01 * std::pow(4.0, 1.5)}) {
        const DelayResult d = bistable_delay(eps, kLn2Over6 * eps);
        pts.push_back({eps, d.delta_T});
    }
    const PowerLawFit f = fit_power_law(pts);
    CHECK(f.b == doctest::Approx(2.0 / 3.0).epsilon(0.02 / (2.0 / 3.0)));
}

TEST_CASE("no switch within the cap") {
    StopRule stop;
    stop.step_cap = 10;
    const DelayResult d = bistable_delay(0.01, 0.001, -1.0, stop);
    CHECK_FALSE(d.switched);
    CHECK_FALSE(d.warning.empty());
    const Trajectory tr = simulate_bistable(0.01, 0.001, -0.9);
    CHECK_THROWS_AS(bistable_landing(tr, d, 0.01), UsageError);
}

TEST_CASE("large ratio is flagged") {
    const DelayResult d = bistable_delay(0.01, 0.01);
    CHECK_FALSE(d.warning.empty());
}

TEST_CASE("landing on the lower branch") {
    const double eps = 0.01;
    const DelayResult d = bistable_delay(eps, kLn2Over6 * eps);
    const Trajectory tr = simulate_bistable(eps, kLn2Over6 * eps, 0.8);
    const LandingReport r = bistable_landing(tr, d, eps);
    CHECK(r.t_final >= 0.8);
    CHECK(r.target == *cubic_equilibria(r.t_final).find(RootLabel::LowerStable));
    CHECK(r.target < -2.0);
    CHECK(r.distance <= 10.0 * std::cbrt(eps));
    CHECK(r.status == LandingStatus::Converged);

    const Trajectory at_switch = simulate_bistable(eps, kLn2Over6 * eps, d.t_switch);
    CHECK(at_switch.final.m == d.m_switch);
    CHECK(bistable_landing(at_switch, d, eps).status == LandingStatus::ConvergenceUnknown);
}

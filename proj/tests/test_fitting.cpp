#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "slowpass/errors.hpp"
#include "slowpass/fitting.hpp"
#include "slowpass/sweep.hpp"

using namespace slowpass;

TEST_CASE("exact power law") {
    std::vector<XY> pts;
    for (double e : {0.1, 0.01, 0.001}) pts.push_back({e, 2.0 * std::pow(e, 2.0 / 3.0)});
    const PowerLawFit f = fit_power_law(pts);
    CHECK(f.C == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.b == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.n == 3);
    CHECK(f(0.01) == doctest::Approx(pts[1].y).epsilon(1e-12));
}

TEST_CASE("round trip, scale equivariance and permutation invariance") {
    std::mt19937_64 rng(20240917);
    std::uniform_real_distribution<double> ucoef(0.05, 20.0), uexp(-2.0, 3.0), ulog(-12.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double C = ucoef(rng), b = uexp(rng);
        std::vector<XY> pts;
        const int n = 2 + trial % 9;
        for (int i = 0; i < n; ++i) {
            double x;
            do {
                x = std::exp(ulog(rng));
            } while (std::any_of(pts.begin(), pts.end(), [&](const XY& p) { return p.x == x; }));
            pts.push_back({x, C * std::pow(x, b)});
        }
        const PowerLawFit f = fit_power_law(pts);
        CHECK(f.C == doctest::Approx(C).epsilon(1e-12));
        CHECK(f.b == doctest::Approx(b).epsilon(1e-12));

        // noisy copy for the invariance checks
        std::normal_distribution<double> noise(0.0, 0.1);
        for (auto& p : pts) p.y *= std::exp(noise(rng));
        const PowerLawFit base = fit_power_law(pts);

        const double k = ucoef(rng);
        std::vector<XY> scaled = pts;
        for (auto& p : scaled) p.y *= k;
        const PowerLawFit fs = fit_power_law(scaled);
        CHECK(fs.C == doctest::Approx(k * base.C).epsilon(1e-12));
        CHECK(fs.b == doctest::Approx(base.b).epsilon(1e-12));

        std::vector<XY> shuffled = pts;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const PowerLawFit fp = fit_power_law(shuffled);
        CHECK(fp.C == base.C);
        CHECK(fp.b == base.b);
        CHECK(fp.r2 == base.r2);
        CHECK(base.r2 >= 0.0);
        CHECK(base.r2 <= 1.0);
    }
}

TEST_CASE("power law errors") {
    CHECK_THROWS_AS(fit_power_law(std::vector<XY>{{1.0, 1.0}}), DomainError);
    CHECK_THROWS_AS(fit_power_law(std::vector<XY>{{1.0, 1.0}, {0.0, 1.0}}), DomainError);
    CHECK_THROWS_AS(fit_power_law(std::vector<XY>{{1.0, 1.0}, {2.0, -1.0}}), DomainError);
    CHECK_THROWS_AS(fit_power_law(std::vector<XY>{{2.0, 1.0}, {2.0, 3.0}}), DomainError);
}

TEST_CASE("tipping times follow eps^(2/3)") {
    std::vector<double> eps;
    for (int k = 0; k <= 6; ++k) eps.push_back(std::pow(10.0, -1.0 - 0.5 * k));
    const ScalingResult r = scaling_experiment(std::log(2.0) / 6.0, eps);
    std::vector<XY> pts;
    for (const auto& row : r.rows) pts.push_back({row.epsilon, row.t_star});
    const PowerLawFit f = fit_power_law(pts);
    CHECK(f.b == doctest::Approx(0.6667).epsilon(0.01 / 0.6667));
    CHECK(f.r2 > 0.999);
}

TEST_CASE("exponent law on exact data") {
    std::vector<IndexedExponent> pairs;
    for (int m : {3, 5, 7, 9, 11}) pairs.push_back({double(m), 1.0 - 1.0 / (2.0 * m + 1.0)});
    for (const auto& f : {fit_exponent_law_linear(pairs), fit_exponent_law(pairs)}) {
        CHECK(f.p == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(f.q == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(f.residual < 1e-10);
        CHECK(f.n == 5);
    }
}

TEST_CASE("exponent law through two points") {
    const std::vector<IndexedExponent> pairs = {{3.0, 0.67}, {15.0, 0.957}};
    const double u3 = 1.0 / 0.33, u15 = 1.0 / 0.043;
    const double p = (u15 - u3) / 12.0, q = u3 - 3.0 * p;
    const ExponentLawFit lin = fit_exponent_law_linear(pairs);
    CHECK(lin.p == doctest::Approx(p).epsilon(1e-12));
    CHECK(lin.q == doctest::Approx(q).epsilon(1e-12));
    const ExponentLawFit nls = fit_exponent_law(pairs);
    CHECK(nls.p == doctest::Approx(p).epsilon(1e-9));
    CHECK(nls.q == doctest::Approx(q).epsilon(1e-9));
    CHECK(nls(3.0) == doctest::Approx(0.67).epsilon(1e-9));
}

TEST_CASE("tabulated boundary exponents give p and q") {
    const std::vector<BoundaryExponent> table = {
        {3, false, 0.6706},  {5, true, 0.6730},   {5, false, 0.8148},  {7, true, 0.8178},
        {7, false, 0.8780},  {9, true, 0.8805},   {9, false, 0.9121},  {11, true, 0.9135},
        {11, false, 0.9328}, {13, true, 0.9334},  {13, false, 0.9466}, {15, true, 0.9446},
        {15, false, 0.9573}};
    const auto pairs = pair_boundary_exponents(table);
    REQUIRE(pairs.size() == 7);
    CHECK(pairs[0].m == 3.0);
    CHECK(pairs[0].b == doctest::Approx(0.5 * (0.6706 + 0.6730)));
    CHECK(pairs[6].m == 15.0);
    CHECK(pairs[6].b == 0.9573);

    const ExponentLawFit f = fit_exponent_law(pairs);
    CHECK(f.p == doctest::Approx(1.3543).epsilon(0.05 / 1.3543));
    CHECK(f.q == doctest::Approx(-1.0362).epsilon(0.1 / 1.0362));
    CHECK(f.b_rms < 0.01);

    // the straight line in u = 1/(1 - b) lands elsewhere
    const ExponentLawFit lin = fit_exponent_law_linear(pairs);
    CHECK(std::abs(lin.p - 1.3543) > 0.05);
    // and the least-squares objective in b prefers the nonlinear answer
    CHECK(f.b_rms < lin.b_rms);
}

TEST_CASE("exponent law errors") {
    CHECK_THROWS_AS(fit_exponent_law(std::vector<IndexedExponent>{{3.0, 0.6}}), DomainError);
    CHECK_THROWS_AS(fit_exponent_law(std::vector<IndexedExponent>{{3.0, 0.6}, {5.0, 1.0}}),
                    DomainError);
    CHECK_THROWS_AS(fit_exponent_law(std::vector<IndexedExponent>{{3.0, 0.0}, {5.0, 0.8}}),
                    DomainError);
    CHECK_THROWS_AS(fit_exponent_law_linear(std::vector<IndexedExponent>{{3.0, 0.6}, {3.0, 0.7}}),
                    DomainError);
}

TEST_CASE("exponent law is order independent") {
    std::vector<IndexedExponent> pairs = {{3, 0.671}, {5, 0.81}, {7, 0.877}, {9, 0.913}, {11, 0.93}};
    const ExponentLawFit a = fit_exponent_law(pairs);
    std::reverse(pairs.begin(), pairs.end());
    const ExponentLawFit b = fit_exponent_law(pairs);
    CHECK(a.p == b.p);
    CHECK(a.q == b.q);
}

TEST_CASE("averaging by index") {
    const std::vector<IndexedExponent> raw = {{5, 0.8}, {3, 0.6}, {5, 0.9}, {3, 0.7}, {9, 0.95}};
    const auto avg = average_exponents_by_index(raw);
    REQUIRE(avg.size() == 3);
    CHECK(avg[0].m == 3.0);
    CHECK(avg[0].b == doctest::Approx(0.65));
    CHECK(avg[1].b == doctest::Approx(0.85));
    CHECK(avg[2].b == 0.95);

    const std::vector<BoundaryExponent> curves = {{3, true, 0.01}, {3, false, 0.6}, {5, true, 0.7}};
    const auto pairs = pair_boundary_exponents(curves);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].b == doctest::Approx(0.65));
}

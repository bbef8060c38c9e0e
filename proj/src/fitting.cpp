#include "slowpass/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "slowpass/errors.hpp"

namespace slowpass {

double PowerLawFit::operator()(double x) const { return C * std::pow(x, b); }

namespace {

struct Line {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 1.0;
    double rms = 0.0;
};

// Points are sorted first so the floating-point sums do not depend on the
// input order.
Line least_squares(std::vector<std::pair<double, double>> pts) {
    std::sort(pts.begin(), pts.end());
    const double n = static_cast<double>(pts.size());
    double mx = 0.0, my = 0.0;
    for (auto [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (auto [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (!(sxx > 0.0)) throw DomainError("degenerate fit: all x values are equal");
    Line l;
    l.slope = sxy / sxx;
    l.intercept = my - l.slope * mx;
    double ss_res = 0.0;
    for (auto [x, y] : pts) {
        const double r = y - (l.intercept + l.slope * x);
        ss_res += r * r;
    }
    l.r2 = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    l.rms = std::sqrt(ss_res / n);
    return l;
}

void check_exponents(std::span<const IndexedExponent> pairs) {
    if (pairs.size() < 2) throw DomainError("exponent fit needs at least two pairs");
    for (const auto& e : pairs) {
        if (!std::isfinite(e.m) || !(e.b > 0.0 && e.b < 1.0)) {
            throw DomainError("exponents must lie strictly inside (0, 1)");
        }
    }
}

void finish(ExponentLawFit& f, std::span<const IndexedExponent> pairs) {
    double su = 0.0, sb = 0.0;
    for (const auto& e : pairs) {
        const double d = f.p * e.m + f.q;
        if (d == 0.0) throw DomainError("fitted p m + q vanishes at a fitted index");
        const double ru = 1.0 / (1.0 - e.b) - d;
        const double rb = e.b - (1.0 - 1.0 / d);
        su += ru * ru;
        sb += rb * rb;
    }
    const double n = static_cast<double>(pairs.size());
    f.residual = std::sqrt(su / n);
    f.b_rms = std::sqrt(sb / n);
    f.n = pairs.size();
}

std::vector<IndexedExponent> sorted(std::span<const IndexedExponent> pairs) {
    std::vector<IndexedExponent> v(pairs.begin(), pairs.end());
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
        return a.m < b.m || (a.m == b.m && a.b < b.b);
    });
    return v;
}

} // namespace

PowerLawFit fit_power_law(std::span<const XY> points) {
    if (points.size() < 2) throw DomainError("power-law fit needs at least two points");
    std::vector<std::pair<double, double>> logs;
    logs.reserve(points.size());
    for (const XY& p : points) {
        if (!(p.x > 0.0) || !(p.y > 0.0) || !std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw DomainError("power-law fit needs finite positive coordinates");
        }
        logs.emplace_back(std::log(p.x), std::log(p.y));
    }
    const Line l = least_squares(std::move(logs));
    return {std::exp(l.intercept), l.slope, l.r2, points.size()};
}

ExponentLawFit fit_exponent_law_linear(std::span<const IndexedExponent> pairs) {
    check_exponents(pairs);
    std::vector<std::pair<double, double>> pts;
    for (const auto& e : pairs) pts.emplace_back(e.m, 1.0 / (1.0 - e.b));
    const Line l = least_squares(std::move(pts));
    ExponentLawFit f;
    f.p = l.slope;
    f.q = l.intercept;
    finish(f, pairs);
    return f;
}

ExponentLawFit fit_exponent_law(std::span<const IndexedExponent> pairs) {
    const auto v = sorted(pairs);
    ExponentLawFit f = fit_exponent_law_linear(v);

    // Residual r_i = b_i - 1 + 1/(p m_i + q); dr/dp = -m_i/d^2, dr/dq = -1/d^2.
    auto cost = [&](double p, double q, bool& ok) {
        double s = 0.0;
        ok = true;
        for (const auto& e : v) {
            const double d = p * e.m + q;
            if (!(d > 1.0)) {  // b in (0,1) needs d > 1
                ok = false;
                return std::numeric_limits<double>::infinity();
            }
            const double r = e.b - 1.0 + 1.0 / d;
            s += r * r;
        }
        return s;
    };

    double p = f.p, q = f.q;
    bool ok = false;
    double c = cost(p, q, ok);
    if (!ok) {
        // Start from the line through the outermost pairs' u values instead.
        const auto& a = v.front();
        const auto& z = v.back();
        const double ua = 1.0 / (1.0 - a.b), uz = 1.0 / (1.0 - z.b);
        p = (z.m != a.m) ? (uz - ua) / (z.m - a.m) : 0.0;
        q = ua - p * a.m;
        c = cost(p, q, ok);
        if (!ok) return f;
    }

    double lambda = 1e-3;
    for (int iter = 0; iter < 200; ++iter) {
        double a11 = 0.0, a12 = 0.0, a22 = 0.0, g1 = 0.0, g2 = 0.0;
        for (const auto& e : v) {
            const double d = p * e.m + q;
            const double r = e.b - 1.0 + 1.0 / d;
            const double jp = -e.m / (d * d), jq = -1.0 / (d * d);
            a11 += jp * jp;
            a12 += jp * jq;
            a22 += jq * jq;
            g1 += jp * r;
            g2 += jq * r;
        }
        bool improved = false;
        while (lambda < 1e12) {
            const double b11 = a11 * (1.0 + lambda), b22 = a22 * (1.0 + lambda);
            const double det = b11 * b22 - a12 * a12;
            if (det == 0.0) break;
            const double dp = -(b22 * g1 - a12 * g2) / det;
            const double dq = -(b11 * g2 - a12 * g1) / det;
            bool step_ok = false;
            const double cn = cost(p + dp, q + dq, step_ok);
            if (step_ok && cn <= c) {
                const bool converged = std::abs(dp) <= 1e-14 * (1.0 + std::abs(p)) &&
                                       std::abs(dq) <= 1e-14 * (1.0 + std::abs(q));
                p += dp;
                q += dq;
                c = cn;
                lambda = std::max(lambda * 0.1, 1e-15);
                improved = !converged;
                break;
            }
            lambda *= 10.0;
        }
        if (!improved) break;
    }
    f.p = p;
    f.q = q;
    finish(f, v);
    return f;
}

std::vector<IndexedExponent> average_exponents_by_index(std::span<const IndexedExponent> pairs) {
    std::map<double, std::pair<double, int>> acc;
    for (const auto& e : sorted(pairs)) {
        auto& slot = acc[e.m];
        slot.first += e.b;
        slot.second += 1;
    }
    std::vector<IndexedExponent> out;
    for (const auto& [m, s] : acc) out.push_back({m, s.first / s.second});
    return out;
}

std::vector<IndexedExponent> pair_boundary_exponents(std::span<const BoundaryExponent> curves) {
    std::vector<IndexedExponent> raw;
    for (const auto& c : curves) {
        if (c.top) {
            if (c.m >= 5) raw.push_back({static_cast<double>(c.m - 2), c.b});
        } else {
            raw.push_back({static_cast<double>(c.m), c.b});
        }
    }
    return average_exponents_by_index(raw);
}

} // namespace slowpass

#include "slowpass/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "slowpass/errors.hpp"
#include "slowpass/parallel.hpp"
#include "slowpass/theory.hpp"

namespace slowpass {

namespace {

void check_axis(const std::vector<double>& v, const char* name) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i]) || !(v[i] > 0.0)) {
            throw DomainError(std::string(name) + " values must be positive and finite");
        }
        if (i > 0 && !(v[i] > v[i - 1])) {
            throw DomainError(std::string(name) + " values must be strictly increasing");
        }
    }
}

std::string format_eps(double eps) {
    std::ostringstream os;
    os.precision(6);
    os << eps;
    return os.str();
}

} // namespace

void GridSpec::validate() const {
    check_axis(eps_values, "eps");
    check_axis(dt_values, "dt");
    if (!std::isfinite(t0) || !(t0 < 0.0)) throw DomainError("t0 must be negative");
    if (!std::isfinite(alpha) || !(alpha > 0.0)) throw DomainError("alpha must be positive");
}

std::vector<double> GridSpec::axis(double lo, double hi, std::size_t n, GridSpacing spacing) {
    if (n == 0) return {};
    if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi)) {
        throw DomainError("axis needs 0 < lo <= hi");
    }
    if (n == 1) return {lo};
    if (hi == lo) throw DomainError("axis with several points needs lo < hi");
    std::vector<double> v(n);
    const double denom = static_cast<double>(n - 1);
    if (spacing == GridSpacing::Log) {
        const double a = std::log(lo), b = std::log(hi);
        for (std::size_t i = 0; i < n; ++i) v[i] = std::exp(a + (b - a) * static_cast<double>(i) / denom);
    } else {
        for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / denom;
    }
    v.front() = lo;
    v.back() = hi;
    return v;
}

GridSpec GridSpec::canonical(std::size_t n_eps, std::size_t n_dt) {
    GridSpec g;
    g.eps_values = axis(1e-4, 0.5, n_eps, GridSpacing::Log);
    g.dt_values = axis(1e-4, 0.5, n_dt, GridSpacing::Log);
    return g;
}

CellResult evaluate_cell(double epsilon, double dt, double t0, double alpha, const StopRule& stop) {
    CellResult c;
    c.epsilon = epsilon;
    c.dt = dt;
    c.report = find_tipping(make_quadratic_params(epsilon, dt, t0, alpha), stop);
    c.cls = c.report.found ? classify(c.report) : SolutionClass::Unclassified;
    return c;
}

RegionMap sweep_grid(const GridSpec& spec, const StopRule& stop, unsigned threads) {
    spec.validate();
    RegionMap map;
    map.eps_values = spec.eps_values;
    map.dt_values = spec.dt_values;
    const std::size_t nd = spec.dt_values.size();
    map.cells.resize(spec.eps_values.size() * nd);
    parallel_for(map.cells.size(), threads, [&](std::size_t k) {
        map.cells[k] = evaluate_cell(spec.eps_values[k / nd], spec.dt_values[k % nd], spec.t0,
                                     spec.alpha, stop);
    });
    return map;
}

std::vector<CellResult> extract_region(const RegionMap& map, std::uint64_t m) {
    std::vector<CellResult> out;
    for (const CellResult& c : map.cells) {
        if (in_negative_tipping_region(c.report, m)) out.push_back(c);
    }
    return out;
}

std::string_view to_string(BoundarySide side) {
    return side == BoundarySide::Top ? "top" : "bottom";
}

bool omega_membership(double epsilon, double dt, std::uint64_t m, double t0, double alpha) {
    TippingDetector det;
    StopRule stop;
    stop.step_cap = m;
    // Nothing after index m matters, and a broken alternation pattern rules
    // the cell out immediately.
    run_observed(MapKind::QuadraticSaddleNode, make_quadratic_params(epsilon, dt, t0, alpha), stop,
                 [&](const Sample& s) {
                     return det.observe(s) || !det.report().oscillating;
                 });
    return in_negative_tipping_region(det.report(), m);
}

BoundaryPoint bisect_boundary(double epsilon, std::uint64_t m, double dt_inside,
                              double dt_outside, double tol, double t0, double alpha) {
    if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
    const bool in_a = omega_membership(epsilon, dt_inside, m, t0, alpha);
    const bool in_b = omega_membership(epsilon, dt_outside, m, t0, alpha);
    if (in_a == in_b) {
        throw BracketingError("no membership change between dt=" + format_eps(dt_inside) +
                              " and dt=" + format_eps(dt_outside) + " at eps=" +
                              format_eps(epsilon));
    }
    double in = in_a ? dt_inside : dt_outside;
    double out = in_a ? dt_outside : dt_inside;
    while (std::abs(out - in) > tol * std::min(in, out)) {
        const double mid = 0.5 * (in + out);
        if (mid == in || mid == out) break;
        (omega_membership(epsilon, mid, m, t0, alpha) ? in : out) = mid;
    }
    return {epsilon, 0.5 * (in + out), in, out};
}

namespace {

struct Bracket {
    bool ok = false;
    double inside = 0.0;
    double outside = 0.0;
};

Bracket scan_for_bracket(double eps, const BoundaryTraceSpec& spec, std::size_t points) {
    const double lo = spec.dt_lo > 0.0 ? spec.dt_lo : 0.5 * eps;
    const auto dts = GridSpec::axis(lo, spec.dt_hi, points, GridSpacing::Log);
    std::vector<char> member(dts.size());
    for (std::size_t j = 0; j < dts.size(); ++j) {
        member[j] = omega_membership(eps, dts[j], spec.m, spec.t0, spec.alpha);
    }
    std::size_t best_start = 0, best_len = 0;
    for (std::size_t j = 0; j < member.size();) {
        if (!member[j]) { ++j; continue; }
        std::size_t k = j;
        while (k < member.size() && member[k]) ++k;
        if (k - j > best_len) {
            best_len = k - j;
            best_start = j;
        }
        j = k;
    }
    Bracket b;
    if (best_len == 0) return b;
    if (spec.side == BoundarySide::Bottom) {
        if (best_start == 0) return b;
        b = {true, dts[best_start], dts[best_start - 1]};
    } else {
        const std::size_t last = best_start + best_len - 1;
        if (last + 1 >= dts.size()) return b;
        b = {true, dts[last], dts[last + 1]};
    }
    return b;
}

} // namespace

BoundaryCurve trace_boundary(const BoundaryTraceSpec& spec, unsigned threads) {
    if (spec.m == 0) throw DomainError("tipping index must be positive");
    if (spec.scan_points < 2) throw DomainError("scan needs at least two points");
    std::vector<double> eps = spec.eps_values;
    std::sort(eps.begin(), eps.end());
    eps.erase(std::unique(eps.begin(), eps.end()), eps.end());

    std::vector<std::optional<BoundaryPoint>> found(eps.size());
    parallel_for(eps.size(), threads, [&](std::size_t i) {
        Bracket b = scan_for_bracket(eps[i], spec, spec.scan_points);
        if (!b.ok) b = scan_for_bracket(eps[i], spec, 4 * spec.scan_points);
        if (!b.ok) return;
        found[i] = bisect_boundary(eps[i], spec.m, b.inside, b.outside, spec.tol, spec.t0,
                                   spec.alpha);
    });

    BoundaryCurve curve;
    curve.m = spec.m;
    curve.side = spec.side;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (found[i]) curve.points.push_back(*found[i]);
        else curve.failed_eps.push_back(eps[i]);
    }
    return curve;
}

std::string_view to_string(ScalingStatus s) {
    switch (s) {
    case ScalingStatus::Ok: return "ok";
    case ScalingStatus::NoTipping: return "no-tipping";
    case ScalingStatus::OutOfBudget: return "out-of-budget";
    }
    return "?";
}

std::size_t ScalingResult::reproduced() const {
    return static_cast<std::size_t>(std::count_if(
        rows.begin(), rows.end(), [](const ScalingRow& r) { return r.status == ScalingStatus::Ok; }));
}

double projected_steps(double epsilon, double dt, double t0) {
    return (-t0 + 2.0 * std::cbrt(epsilon * epsilon)) / dt;
}

namespace {

ScalingResult run_scaling(const std::vector<double>& eps_values, const ScalingOptions& opt,
                          auto&& dt_of) {
    if (!(opt.step_budget > 0.0)) throw DomainError("step budget must be positive");
    ScalingResult res;
    res.rows.resize(eps_values.size());
    for (std::size_t i = 0; i < eps_values.size(); ++i) {
        const double eps = eps_values[i];
        if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("eps values must be positive");
        ScalingRow& row = res.rows[i];
        row.epsilon = eps;
        row.dt = dt_of(eps);
        make_quadratic_params(eps, row.dt, opt.t0, opt.alpha).validate();
        row.projected_steps = projected_steps(eps, row.dt, opt.t0);
        if (row.projected_steps > opt.step_budget) row.status = ScalingStatus::OutOfBudget;
    }

    parallel_for(res.rows.size(), opt.threads, [&](std::size_t i) {
        ScalingRow& row = res.rows[i];
        if (row.status == ScalingStatus::OutOfBudget) return;
        StopRule stop;
        stop.step_cap = static_cast<std::uint64_t>(opt.step_budget);
        const TippingReport rep =
            find_tipping(make_quadratic_params(row.epsilon, row.dt, opt.t0, opt.alpha), stop);
        if (!rep.found) {
            row.status = ScalingStatus::NoTipping;
            return;
        }
        row.m_star = rep.m_star;
        row.t_star = rep.t_star;
        row.scaled_t_star = rep.t_star / std::cbrt(row.epsilon * row.epsilon);
    });

    for (const ScalingRow& row : res.rows) {
        if (row.status == ScalingStatus::OutOfBudget) {
            std::ostringstream os;
            os << "eps=" << format_eps(row.epsilon) << ": about " << format_eps(row.projected_steps)
               << " steps needed, over the budget of " << format_eps(opt.step_budget);
            res.warnings.push_back(os.str());
        } else if (row.status == ScalingStatus::NoTipping) {
            res.warnings.push_back("eps=" + format_eps(row.epsilon) +
                                   ": no tipping within the step budget");
        }
    }
    if (!res.rows.empty() && res.reproduced() == 0 &&
        std::all_of(res.rows.begin(), res.rows.end(),
                    [](const ScalingRow& r) { return r.status == ScalingStatus::OutOfBudget; })) {
        res.warnings.push_back("every cell is out of budget; nothing was simulated");
    }
    return res;
}

void warn_ratio(ScalingResult& res, double ratio_max, const ScalingOptions& opt) {
    const TheoryConstants k =
        constants(make_quadratic_params(1.0, 0.5, opt.t0, opt.alpha));
    if (ratio_max >= k.delta0) {
        std::ostringstream os;
        os << "dt/eps reaches " << format_eps(ratio_max) << ", not below delta0="
           << format_eps(k.delta0) << "; the outer-region estimates do not apply";
        res.warnings.insert(res.warnings.begin(), os.str());
    }
}

} // namespace

ScalingResult scaling_experiment(double ratio, const std::vector<double>& eps_values,
                                 const ScalingOptions& options) {
    if (!(ratio > 0.0) || !std::isfinite(ratio)) throw DomainError("ratio must be positive");
    ScalingResult res =
        run_scaling(eps_values, options, [ratio](double eps) { return ratio * eps; });
    warn_ratio(res, ratio, options);
    return res;
}

ScalingResult scaling_experiment_powerlaw(double C, double b_exp,
                                          const std::vector<double>& eps_values,
                                          const ScalingOptions& options) {
    if (!(C > 0.0) || !std::isfinite(C) || !std::isfinite(b_exp)) {
        throw DomainError("need C > 0 and a finite exponent");
    }
    auto dt_of = [C, b_exp](double eps) { return C * std::pow(eps, b_exp); };
    for (double eps : eps_values) {
        if (eps > 0.0 && dt_of(eps) >= 0.5) {
            throw DomainError("dt = C eps^b must stay below 0.5 (eps=" + format_eps(eps) + ")");
        }
    }
    ScalingResult res = run_scaling(eps_values, options, dt_of);
    double rmax = 0.0;
    for (const ScalingRow& r : res.rows) rmax = std::max(rmax, r.dt / r.epsilon);
    if (!res.rows.empty()) warn_ratio(res, rmax, options);
    return res;
}

} // namespace slowpass

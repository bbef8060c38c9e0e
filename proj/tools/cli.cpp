#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "slowpass/applications.hpp"
#include "slowpass/csv.hpp"
#include "slowpass/dynamics.hpp"
#include "slowpass/errors.hpp"
#include "slowpass/fitting.hpp"
#include "slowpass/svg.hpp"
#include "slowpass/sweep.hpp"
#include "slowpass/theory.hpp"
#include "slowpass/tipping.hpp"

namespace fs = std::filesystem;

namespace slowpass::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string g6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double parse_real_text(const std::string& text, const std::string& what) {
    const std::string s = trim(text);
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    if (b != e && *b == '+') ++b;
    auto res = std::from_chars(b, e, v);
    if (s.empty() || res.ec != std::errc() || res.ptr != e || !std::isfinite(v)) {
        throw UsageError(what + ": not a finite number: '" + text + "'");
    }
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    return out;
}

} // namespace

double parse_ratio(const std::string& text) {
    const std::string s = trim(text);
    if (s.rfind("ln2/", 0) == 0) {
        const double d = parse_real_text(s.substr(4), "ratio");
        if (!(d > 0.0)) throw UsageError("ratio: divisor must be positive");
        return std::log(2.0) / d;
    }
    return parse_real_text(s, "ratio");
}

std::map<std::string, std::string> parse_config(std::istream& is) {
    std::map<std::string, std::string> kv;
    std::string line;
    int n = 0;
    while (std::getline(is, line)) {
        ++n;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw UsageError("config line " + std::to_string(n) + ": expected key = value");
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) throw UsageError("config line " + std::to_string(n) + ": empty key");
        if (!kv.emplace(key, value).second) {
            throw UsageError("config line " + std::to_string(n) + ": duplicate key '" + key + "'");
        }
    }
    return kv;
}

namespace {

struct OptSpec {
    std::string key;
    std::string def;
    std::string help;
};

class Run;

struct Command {
    std::string name;
    std::string help;
    std::vector<OptSpec> opts;
    std::function<int(Run&)> body;
};

class Run {
public:
    Run(const Command& cmd, std::ostream& out, std::ostream& err) : cmd(cmd), out(out), err(err) {}

    const Command& cmd;
    std::ostream& out;
    std::ostream& err;
    std::map<std::string, std::string> v;
    bool plot = true;
    fs::path dir;

    bool has(const std::string& key) const { return !v.at(key).empty(); }

    const std::string& text(const std::string& key) const {
        const std::string& s = v.at(key);
        if (s.empty()) throw UsageError("--" + key + " is required");
        return s;
    }
    double real(const std::string& key) const { return parse_real_text(text(key), "--" + key); }
    double positive(const std::string& key) const {
        const double x = real(key);
        if (!(x > 0.0)) throw UsageError("--" + key + " must be positive");
        return x;
    }
    std::uint64_t count(const std::string& key) const {
        const double x = real(key);
        if (!(x >= 0.0) || x != std::floor(x) || x > 1.8e19) {
            throw UsageError("--" + key + " must be a non-negative integer");
        }
        return static_cast<std::uint64_t>(x);
    }
    std::vector<double> list(const std::string& key, bool ratios = false) const {
        std::vector<double> xs;
        for (const auto& item : split(text(key), ',')) {
            xs.push_back(ratios ? parse_ratio(item) : parse_real_text(item, "--" + key));
        }
        return xs;
    }
    std::pair<double, double> range(const std::string& key) const {
        const auto parts = split(text(key), ':');
        if (parts.size() != 2) throw UsageError("--" + key + " expects a:b");
        const double a = parse_real_text(parts[0], "--" + key);
        const double b = parse_real_text(parts[1], "--" + key);
        if (!(a > 0.0 && b >= a)) throw UsageError("--" + key + " needs 0 < a <= b");
        return {a, b};
    }
    std::pair<std::size_t, std::size_t> grid(const std::string& key) const {
        const auto parts = split(text(key), 'x');
        if (parts.size() != 2) throw UsageError("--" + key + " expects WxH");
        const double w = parse_real_text(parts[0], "--" + key);
        const double h = parse_real_text(parts[1], "--" + key);
        if (w < 1 || h < 1 || w != std::floor(w) || h != std::floor(h)) {
            throw UsageError("--" + key + " needs positive integer sizes");
        }
        return {static_cast<std::size_t>(w), static_cast<std::size_t>(h)};
    }
    unsigned threads() const {
        const std::string& s = text("threads");
        if (s == "auto") return 0;
        const double x = parse_real_text(s, "--threads");
        if (!(x >= 1.0) || x != std::floor(x) || x > 4096) {
            throw UsageError("--threads must be a positive integer or 'auto'");
        }
        return static_cast<unsigned>(x);
    }

    /// dt from --dt or --ratio (default ln2/6); records the resolved choice.
    double resolve_dt(double eps) {
        if (has("dt") && has("ratio")) throw UsageError("--dt and --ratio are mutually exclusive");
        if (has("dt")) return positive("dt");
        if (!has("ratio")) v["ratio"] = "ln2/6";
        const double r = parse_ratio(v["ratio"]);
        if (!(r > 0.0)) throw UsageError("--ratio must be positive");
        return r * eps;
    }

    template <class Fn>
    void write(const std::string& name, Fn&& fn) {
        const fs::path p = dir / name;
        std::ofstream f(p, std::ios::binary);
        if (!f) throw UsageError("cannot write " + p.string());
        fn(f);
        if (!f) throw UsageError("write failed: " + p.string());
    }
    void write_text(const std::string& name, const std::string& body) {
        write(name, [&](std::ostream& os) { os << body; });
    }
};

StopRule stop_from(const Run& r) {
    StopRule s;
    s.step_cap = r.count("steps");
    return s;
}

std::vector<OptSpec> model_opts() {
    return {{"t0", "-1", "initial time (negative)"}, {"alpha", "1", "initial offset factor"}};
}

std::vector<OptSpec> with(std::vector<OptSpec> a, const std::vector<OptSpec>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

// --- simulate ---------------------------------------------------------------

int cmd_simulate(Run& r) {
    const double eps = r.positive("epsilon");
    const double dt = r.resolve_dt(eps);
    const SlowPassageParams params = make_quadratic_params(eps, dt, r.real("t0"), r.real("alpha"));
    StopRule stop = stop_from(r);
    stop.x_floor = r.real("x-floor");
    SamplingPolicy sampling;
    sampling.max_stored = static_cast<std::size_t>(r.count("max-stored"));
    if (sampling.max_stored < 2) throw UsageError("--max-stored must be at least 2");

    TippingDetector det;
    const Trajectory traj =
        simulate(MapKind::QuadraticSaddleNode, params, stop, sampling, StopAtTipping{det});
    const TippingReport& rep = det.report();

    r.write("trajectory.csv", [&](std::ostream& os) { csv::write_trajectory(os, traj); });
    const csv::TippingRow row{params, rep};
    r.write("tipping.csv", [&](std::ostream& os) { csv::write_tipping(os, {&row, 1}); });

    if (rep.found) {
        r.out << "m_star=" << rep.m_star << " t_star=" << g6(rep.t_star)
              << " t_star/eps^(2/3)=" << g6(rep.t_star / std::cbrt(eps * eps))
              << " class=" << to_string(classify(rep)) << '\n';
    } else {
        r.out << "no tipping point (" << to_string(traj.stop_reason) << " at m=" << traj.final.m
              << ")\n";
    }

    if (r.plot) {
        svg::Plot p;
        p.title = "x(m), eps=" + g6(eps) + ", dt=" + g6(dt);
        p.x_label = "t";
        p.y_label = "x";
        svg::Series xs{"x(m)", {}, {}, "#1f77b4"}, up{"stable", {}, {}, "#2ca02c"},
            dn{"unstable", {}, {}, "#d62728"};
        dn.dashed = true;
        const std::size_t step = std::max<std::size_t>(1, traj.samples.size() / 4000);
        for (std::size_t i = 0; i < traj.samples.size(); i += step) {
            const Sample& s = traj.samples[i];
            xs.x.push_back(s.t);
            xs.y.push_back(s.x);
            if (s.t <= 0.0) {
                up.x.push_back(s.t);
                up.y.push_back(stable_branch(s.t));
                dn.x.push_back(s.t);
                dn.y.push_back(unstable_branch(s.t));
            }
        }
        if (!traj.samples.empty() && step > 1) {
            xs.x.push_back(traj.samples.back().t);
            xs.y.push_back(traj.samples.back().x);
        }
        p.series = {up, dn, xs};
        r.write_text("trajectory.svg", svg::render(p));
    }
    return kOk;
}

// --- sweep / regions --------------------------------------------------------

GridSpec grid_from(const Run& r) {
    const auto [w, h] = r.grid("grid");
    const auto [e0, e1] = r.range("eps-range");
    const auto [d0, d1] = r.range("dt-range");
    GridSpec g;
    const std::string sp = r.text("spacing");
    if (sp == "log") g.spacing = GridSpacing::Log;
    else if (sp == "linear") g.spacing = GridSpacing::Linear;
    else throw UsageError("--spacing must be log or linear");
    g.eps_values = GridSpec::axis(e0, e1, w, g.spacing);
    g.dt_values = GridSpec::axis(d0, d1, h, g.spacing);
    g.t0 = r.real("t0");
    g.alpha = r.real("alpha");
    return g;
}

void class_summary(Run& r, const RegionMap& map) {
    std::map<std::string, std::size_t> counts;
    for (const auto& c : map.cells) ++counts[std::string(to_string(c.cls))];
    for (const auto& [k, n] : counts) r.out << k << ": " << n << '\n';
}

int cmd_sweep(Run& r) {
    const RegionMap map = sweep_grid(grid_from(r), stop_from(r), r.threads());
    r.write("region.csv", [&](std::ostream& os) { csv::write_region(os, map); });
    class_summary(r, map);
    if (r.plot) r.write_text("region.svg", svg::render_region_raster(map, "solution types"));
    return kOk;
}

int cmd_regions(Run& r) {
    const RegionMap map = sweep_grid(grid_from(r), stop_from(r), r.threads());
    r.write("region.csv", [&](std::ostream& os) { csv::write_region(os, map); });
    for (double md : r.list("m")) {
        if (md < 1 || md != std::floor(md)) throw UsageError("--m entries must be positive integers");
        const auto m = static_cast<std::uint64_t>(md);
        const auto cells = extract_region(map, m);
        r.write("omega_" + std::to_string(m) + ".csv",
                [&](std::ostream& os) { csv::write_region_cells(os, cells); });
        r.out << "Omega_" << m << ": " << cells.size() << " cells\n";
    }
    if (r.plot) r.write_text("region.svg", svg::render_region_raster(map, "negative tipping regions"));
    return kOk;
}

// --- boundaries -------------------------------------------------------------

std::string curve_label(const BoundaryCurve& c) {
    return "gamma" + std::to_string(c.m) + (c.side == BoundarySide::Top ? "+" : "-");
}

int cmd_boundaries(Run& r) {
    const auto [e0, e1] = r.range("eps-range");
    const auto n = static_cast<std::size_t>(r.count("points"));
    if (n < 1) throw UsageError("--points must be at least 1");
    const auto eps = GridSpec::axis(e0, e1, n, GridSpacing::Log);

    std::vector<BoundarySide> sides;
    const std::string side = r.text("side");
    if (side == "top" || side == "both") sides.push_back(BoundarySide::Top);
    if (side == "bottom" || side == "both") sides.push_back(BoundarySide::Bottom);
    if (sides.empty()) throw UsageError("--side must be top, bottom or both");

    BoundaryTraceSpec spec;
    spec.eps_values = eps;
    spec.t0 = r.real("t0");
    spec.alpha = r.real("alpha");
    spec.tol = r.positive("tol");
    spec.scan_points = static_cast<std::size_t>(r.count("scan"));
    if (r.has("dt-range")) std::tie(spec.dt_lo, spec.dt_hi) = r.range("dt-range");

    std::vector<csv::LabeledFit> fits;
    std::vector<BoundaryExponent> exps;
    std::vector<BoundaryCurve> curves;
    bool short_curve = false;
    for (double md : r.list("m")) {
        if (md < 1 || md != std::floor(md)) throw UsageError("--m entries must be positive integers");
        for (BoundarySide s : sides) {
            spec.m = static_cast<std::uint64_t>(md);
            spec.side = s;
            BoundaryCurve c = trace_boundary(spec, r.threads());
            const std::string label = curve_label(c);
            for (double fe : c.failed_eps) {
                r.err << "warning: " << label << ": no bracket at eps=" << g6(fe) << '\n';
            }
            r.write("boundary_m" + std::to_string(c.m) + "_" + std::string(to_string(s)) + ".csv",
                    [&](std::ostream& os) { csv::write_boundary(os, c); });
            if (c.points.size() >= 2) {
                std::vector<XY> pts;
                for (const auto& p : c.points) pts.push_back({p.epsilon, p.dt});
                const PowerLawFit f = fit_power_law(pts);
                fits.push_back({label, f});
                exps.push_back({static_cast<unsigned>(c.m), s == BoundarySide::Top, f.b});
                r.out << label << ": C=" << g6(f.C) << " b=" << g6(f.b) << " r2=" << g6(f.r2)
                      << " n=" << f.n << '\n';
            } else {
                r.err << "error: " << label << ": fewer than two boundary points\n";
                short_curve = true;
            }
            curves.push_back(std::move(c));
        }
    }
    r.write("fits.csv", [&](std::ostream& os) { csv::write_fits(os, fits); });

    const auto pairs = pair_boundary_exponents(exps);
    if (pairs.size() >= 2) {
        const ExponentLawFit f = fit_exponent_law(pairs);
        r.write("exponent_fit.csv", [&](std::ostream& os) { csv::write_exponent_fit(os, f); });
        r.out << "b_m = 1 - 1/(p m + q): p=" << g6(f.p) << " q=" << g6(f.q) << '\n';
    }

    if (r.plot && !curves.empty()) {
        svg::Plot p;
        p.title = "boundary curves";
        p.x_label = "epsilon";
        p.y_label = "dt";
        p.log_x = p.log_y = true;
        const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                 "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
        std::size_t k = 0;
        for (const auto& c : curves) {
            svg::Series s{curve_label(c), {}, {}, palette[k++ % 8]};
            s.markers = true;
            for (const auto& pt : c.points) {
                s.x.push_back(pt.epsilon);
                s.y.push_back(pt.dt);
            }
            p.series.push_back(std::move(s));
        }
        r.write_text("boundaries.svg", svg::render(p));
    }
    if (short_curve) throw BracketingError("boundary tracing left a curve without a fit");
    return kOk;
}

// --- scaling ----------------------------------------------------------------

int cmd_scaling(Run& r) {
    const std::vector<double> eps = r.list("eps");
    ScalingOptions opt;
    opt.t0 = r.real("t0");
    opt.alpha = r.real("alpha");
    opt.step_budget = r.positive("budget");
    opt.threads = r.threads();

    ScalingResult res;
    if (r.has("b")) {
        if (r.has("ratio")) throw UsageError("--ratio and --b are mutually exclusive");
        if (!r.has("C")) r.v["C"] = "ln2/6";
        res = scaling_experiment_powerlaw(parse_ratio(r.v["C"]), r.real("b"), eps, opt);
    } else {
        if (r.has("C")) throw UsageError("--C needs --b");
        if (!r.has("ratio")) r.v["ratio"] = "ln2/6";
        res = scaling_experiment(parse_ratio(r.v["ratio"]), eps, opt);
    }
    for (const auto& w : res.warnings) r.err << "warning: " << w << '\n';
    r.write("scaling.csv", [&](std::ostream& os) { csv::write_scaling(os, res); });

    std::vector<XY> pts;
    for (const auto& row : res.rows) {
        r.out << "eps=" << g6(row.epsilon) << " dt=" << g6(row.dt) << ' ' << to_string(row.status);
        if (row.status == ScalingStatus::Ok) {
            r.out << " m_star=" << row.m_star << " t_star=" << g6(row.t_star)
                  << " ratio=" << g6(row.scaled_t_star);
            if (row.t_star > 0.0) pts.push_back({row.epsilon, row.t_star});
        }
        r.out << '\n';
    }
    std::optional<PowerLawFit> fit;
    if (pts.size() >= 2) {
        fit = fit_power_law(pts);
        const csv::LabeledFit lf{"t_star", *fit};
        r.write("fit.csv", [&](std::ostream& os) { csv::write_fits(os, {&lf, 1}); });
        r.out << "t_star = " << g6(fit->C) << " eps^" << g6(fit->b) << " (r2=" << g6(fit->r2)
              << ")\n";
    }
    if (r.plot) {
        svg::Plot p;
        p.title = "tipping time";
        p.x_label = "epsilon";
        p.y_label = "t_star";
        p.log_x = p.log_y = true;
        svg::Series s{"simulated", {}, {}, "#1f77b4"};
        s.markers = true;
        for (const auto& pt : pts) {
            s.x.push_back(pt.x);
            s.y.push_back(pt.y);
        }
        p.series.push_back(s);
        if (fit) {
            svg::Series l{"fit", {}, {}, "#d62728"};
            l.dashed = true;
            for (const auto& pt : pts) {
                l.x.push_back(pt.x);
                l.y.push_back((*fit)(pt.x));
            }
            p.series.push_back(l);
        }
        r.write_text("scaling.svg", svg::render(p));
    }
    if (!res.rows.empty() && std::all_of(res.rows.begin(), res.rows.end(), [](const auto& row) {
            return row.status == ScalingStatus::OutOfBudget;
        })) {
        throw BudgetError("every cell exceeds the step budget");
    }
    return kOk;
}

// --- fit ----------------------------------------------------------------------

int cmd_fit(Run& r) {
    std::ifstream in(r.text("input"));
    if (!in) throw UsageError("cannot read " + r.text("input"));
    const std::string law = r.text("law");
    if (law == "power") {
        const auto pts = csv::read_points(in, r.has("x-col") ? r.text("x-col") : "x",
                                          r.has("y-col") ? r.text("y-col") : "y");
        const csv::LabeledFit lf{r.text("label"), fit_power_law(pts)};
        r.write("fit.csv", [&](std::ostream& os) { csv::write_fits(os, {&lf, 1}); });
        r.out << "C=" << g6(lf.fit.C) << " b=" << g6(lf.fit.b) << " r2=" << g6(lf.fit.r2)
              << " n=" << lf.fit.n << '\n';
    } else if (law == "exponent") {
        const auto pts = csv::read_points(in, r.has("x-col") ? r.text("x-col") : "m",
                                          r.has("y-col") ? r.text("y-col") : "b");
        std::vector<IndexedExponent> pairs;
        for (const auto& p : pts) pairs.push_back({p.x, p.y});
        const ExponentLawFit f = fit_exponent_law(pairs);
        r.write("exponent_fit.csv", [&](std::ostream& os) { csv::write_exponent_fit(os, f); });
        r.out << "p=" << g6(f.p) << " q=" << g6(f.q) << " residual=" << g6(f.residual) << '\n';
    } else {
        throw UsageError("--law must be power or exponent");
    }
    return kOk;
}

// --- bistable -----------------------------------------------------------------

int cmd_bistable(Run& r) {
    const std::vector<double> eps = r.list("epsilon");
    const double t0 = r.real("t0");
    const double ratio = parse_ratio(r.text("ratio"));
    if (!(ratio > 0.0)) throw UsageError("--ratio must be positive");
    const double t_end = r.real("t-end");
    const StopRule stop = stop_from(r);

    std::vector<DelayResult> delays;
    std::vector<XY> pts;
    svg::Plot traj_plot;
    traj_plot.title = "bistable sweep";
    traj_plot.x_label = "t";
    traj_plot.y_label = "y";
    const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd"};
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0)) throw UsageError("--epsilon entries must be positive");
        const double dt = ratio * eps[i];
        DelayResult d = bistable_delay(eps[i], dt, t0, stop);
        if (!d.warning.empty()) r.err << "warning: eps=" << g6(eps[i]) << ": " << d.warning << '\n';
        r.out << "eps=" << g6(eps[i]);
        if (d.switched) {
            r.out << " t_switch=" << g6(d.t_switch) << " delta_T=" << g6(d.delta_T)
                  << " delta_T/eps^(2/3)=" << g6(d.delta_T / std::cbrt(eps[i] * eps[i]));
            if (d.delta_T > 0.0) pts.push_back({eps[i], d.delta_T});
            if (t_end > d.t_switch) {
                SamplingPolicy sp;
                sp.max_stored = 4096;
                const Trajectory tr = simulate_bistable(eps[i], dt, t_end, t0, sp);
                const LandingReport land = bistable_landing(tr, d, eps[i]);
                r.out << " landing=" << to_string(land.status) << " (y=" << g6(land.y_final)
                      << ", target " << g6(land.target) << ")";
                if (r.plot) {
                    svg::Series s{"eps=" + g6(eps[i]), {}, {}, palette[i % 4]};
                    for (const auto& smp : tr.samples) {
                        s.x.push_back(smp.t);
                        s.y.push_back(smp.x);
                    }
                    traj_plot.series.push_back(std::move(s));
                }
            }
        } else {
            r.out << " no switch";
        }
        r.out << '\n';
        delays.push_back(d);
    }
    r.write("delays.csv", [&](std::ostream& os) { csv::write_delays(os, delays); });
    std::optional<PowerLawFit> fit;
    if (pts.size() >= 2) {
        fit = fit_power_law(pts);
        const csv::LabeledFit lf{"delta_T", *fit};
        r.write("delay_fit.csv", [&](std::ostream& os) { csv::write_fits(os, {&lf, 1}); });
        r.out << "delta_T = " << g6(fit->C) << " eps^" << g6(fit->b) << '\n';
    }
    if (r.plot) {
        svg::Series up{"equilibria", {}, {}, "#555555"}, mid{"", {}, {}, "#555555"},
            lo{"", {}, {}, "#555555"};
        mid.dashed = true;
        for (int k = 0; k <= 400; ++k) {
            const double t = t0 + (t_end - t0) * k / 400.0;
            const auto e = cubic_equilibria(t);
            if (auto y = e.find(RootLabel::UpperStable)) { up.x.push_back(t); up.y.push_back(*y); }
            if (auto y = e.find(RootLabel::Unstable)) { mid.x.push_back(t); mid.y.push_back(*y); }
            if (auto y = e.find(RootLabel::LowerStable)) { lo.x.push_back(t); lo.y.push_back(*y); }
        }
        traj_plot.series.insert(traj_plot.series.begin(), {up, mid, lo});
        r.write_text("bistable.svg", svg::render(traj_plot));
        if (fit) {
            svg::Plot p;
            p.title = "bifurcation delay";
            p.x_label = "epsilon";
            p.y_label = "delta_T";
            p.log_x = p.log_y = true;
            svg::Series s{"simulated", {}, {}, "#1f77b4"};
            s.markers = true;
            svg::Series ref{"slope 2/3", {}, {}, "#d62728"};
            ref.dashed = true;
            for (const auto& pt : pts) {
                s.x.push_back(pt.x);
                s.y.push_back(pt.y);
                ref.x.push_back(pt.x);
                ref.y.push_back(pts.front().y * std::pow(pt.x / pts.front().x, 2.0 / 3.0));
            }
            p.series = {s, ref};
            r.write_text("delay.svg", svg::render(p));
        }
    }
    return kOk;
}

// --- verify -------------------------------------------------------------------

int cmd_verify(Run& r) {
    const double t0 = r.real("t0");
    const double alpha = r.real("alpha");
    bool all = true;
    auto report = [&](bool ok, const std::string& what) {
        r.out << (ok ? "PASS " : "FAIL ") << what << '\n';
        all = all && ok;
    };

    std::vector<csv::EnvelopeRow> env_rows;
    for (double eps : r.list("epsilon")) {
        for (double ratio : r.list("ratio", true)) {
            const auto params = make_quadratic_params(eps, ratio * eps, t0, alpha);
            const auto consts = constants(params);
            StopRule stop;
            stop.t_max = 0.0;
            SamplingPolicy sp;
            sp.max_stored = 1u << 22;
            const Trajectory tr = simulate(MapKind::QuadraticSaddleNode, params, stop, sp);
            const EnvelopeCheck c = outer_envelope(tr, consts, params);
            env_rows.push_back({eps, params.dt, c});
            const std::string tag = "eps=" + g6(eps) + " dt/eps=" + g6(ratio);
            report(c.passed, "outer envelope " + tag + ": r in [" + g6(c.realized_lo) + ", " +
                                 g6(c.realized_hi) + "], K=" + g6(consts.K));
            report(c.sandwich_holds, "outer sandwich " + tag);
        }
    }
    r.write("envelope.csv", [&](std::ostream& os) { csv::write_envelopes(os, env_rows); });

    std::vector<csv::CornerRow> corner_rows;
    const double cratio = parse_ratio(r.text("corner-ratio"));
    double lo = INFINITY, hi = -INFINITY, slo = INFINITY, shi = -INFINITY;
    for (double eps : r.list("corner-eps")) {
        const auto params = make_quadratic_params(eps, cratio * eps, t0, alpha);
        const CornerReport c = corner_analysis(params);
        corner_rows.push_back({eps, params.dt, c});
        const std::string tag = "eps=" + g6(eps);
        report(c.decreasing, "corner sequence decreasing " + tag);
        report(c.positive_to_m0, "corner sequence positive through m0 " + tag);
        lo = std::min(lo, c.tipping_ratio);
        hi = std::max(hi, c.tipping_ratio);
        slo = std::min(slo, c.c2);
        shi = std::max(shi, c.c2);
        r.out << "     " << tag << ": s_m2=" << g6(c.c2) << " t_star/eps^(2/3)="
              << g6(c.tipping_ratio) << '\n';
    }
    if (!corner_rows.empty()) {
        report((hi - lo) / lo < 0.05, "t_star/eps^(2/3) spread " + g6((hi - lo) / lo));
        report((shi - slo) / slo < 0.05, "s_m2 spread " + g6((shi - slo) / slo));
    }
    r.write("corner.csv", [&](std::ostream& os) { csv::write_corners(os, corner_rows); });

    const auto [blo, bhi] = r.range("xi-band");
    std::ostringstream xi_csv;
    xi_csv << "epsilon,y,xi,scaled\n";
    for (double eps : r.list("xi-eps")) {
        const XiParams xp;
        const double y_hi = -std::pow(eps, 1.0 / (xp.p + 1.0));
        double mn = INFINITY, mx = -INFINITY;
        const auto ys = GridSpec::axis(-y_hi, 0.9, 40, GridSpacing::Log);
        for (double a : ys) {
            const double y = -a;
            const double xi = xi_function(y, eps, xp);
            const double scaled = xi * a / eps;
            mn = std::min(mn, scaled);
            mx = std::max(mx, scaled);
            xi_csv << csv::format_double(eps) << ',' << csv::format_double(y) << ','
                   << csv::format_double(xi) << ',' << csv::format_double(scaled) << '\n';
        }
        report(mn >= blo && mx <= bhi, "xi |y|/eps in [" + g6(mn) + ", " + g6(mx) + "] eps=" +
                                           g6(eps));
    }
    r.write_text("xi.csv", xi_csv.str());
    return all ? kOk : kNumerical;
}

// -----------------------------------------------------------------------------

std::vector<Command> commands() {
    const std::vector<OptSpec> common = {{"out", ".", "output directory"},
                                         {"threads", "1", "worker threads, or auto"}};
    std::vector<Command> cs;
    cs.push_back({"simulate", "one trajectory of the quadratic map up to its tipping point",
                  with(with({{"epsilon", "", "sweep rate"},
                             {"dt", "", "time step"},
                             {"ratio", "", "dt/epsilon (ln2/N accepted); default ln2/6"},
                             {"steps", "100000000", "step cap"},
                             {"max-stored", "1000000", "stored samples before decimation"},
                             {"x-floor", "-1000000", "divergence floor"}},
                            model_opts()),
                       common),
                  cmd_simulate});
    const std::vector<OptSpec> grid = {{"grid", "64x64", "cells WxH (eps x dt)"},
                                       {"eps-range", "0.0001:0.5", "eps range a:b"},
                                       {"dt-range", "0.0001:0.5", "dt range a:b"},
                                       {"spacing", "log", "log or linear"},
                                       {"steps", "100000000", "step cap per cell"}};
    cs.push_back({"sweep", "classify every cell of an (eps, dt) grid",
                  with(with(grid, model_opts()), common), cmd_sweep});
    cs.push_back({"regions", "negative-tipping regions Omega_m of an (eps, dt) grid",
                  with(with(with(grid, {{"m", "1,3,5,7,9", "tipping indices"}}), model_opts()),
                       common),
                  cmd_regions});
    cs.push_back({"boundaries", "trace and fit boundary curves of Omega_m",
                  with(with({{"m", "3", "tipping indices"},
                             {"side", "both", "top, bottom or both"},
                             {"eps-range", "0.000001:0.0001", "eps range a:b"},
                             {"points", "10", "eps values (log spaced)"},
                             {"dt-range", "", "dt scan window a:b; default eps/2:0.5"},
                             {"scan", "2000", "dt scan points"},
                             {"tol", "0.000001", "relative bisection tolerance"}},
                            model_opts()),
                       common),
                  cmd_boundaries});
    cs.push_back({"scaling", "tipping time against eps at dt = ratio*eps or dt = C*eps^b",
                  with(with({{"eps", "1,0.1,0.01,0.001,0.0001,0.00001", "eps list"},
                             {"ratio", "", "dt/eps; default ln2/6"},
                             {"C", "", "coefficient of dt = C eps^b; default ln2/6"},
                             {"b", "", "exponent of dt = C eps^b"},
                             {"budget", "20000000000", "step budget per cell"}},
                            model_opts()),
                       common),
                  cmd_scaling});
    cs.push_back({"fit", "power-law or exponent-law fit of a CSV",
                  with({{"input", "", "CSV with a header row"},
                        {"law", "power", "power (y = C x^b) or exponent (b_m = 1 - 1/(pm+q))"},
                        {"x-col", "", "x column; default x (power) or m (exponent)"},
                        {"y-col", "", "y column; default y (power) or b (exponent)"},
                        {"label", "fit", "label written to the CSV"}},
                       common),
                  cmd_fit});
    cs.push_back({"bistable", "delayed switching in the bistable cubic",
                  with({{"epsilon", "0.01,0.028284271247461901,0.08", "eps list"},
                        {"ratio", "ln2/6", "dt/eps"},
                        {"t0", "-1", "initial time"},
                        {"t-end", "1.5", "horizon of the plotted trajectories"},
                        {"steps", "100000000", "step cap"}},
                       common),
                  cmd_bistable});
    cs.push_back({"verify", "envelope, corner-layer and xi checks",
                  with(with({{"epsilon", "0.01,0.001", "eps list for the envelope"},
                             {"ratio", "ln2/12,0.10397207708399179", "dt/eps list"},
                             {"corner-eps", "0.01,0.001,0.0001", "eps list for the corner"},
                             {"corner-ratio", "ln2/6", "dt/eps for the corner"},
                             {"xi-eps", "0.01,0.001,0.0001", "eps list for xi"},
                             {"xi-band", "0.1:10", "band for xi |y|/eps"}},
                            model_opts()),
                       common),
                  cmd_verify});
    return cs;
}

void write_manifest(const Run& r, double seconds, int status) {
    std::ofstream f(r.dir / "run-manifest.txt", std::ios::binary);
    if (!f) return;
    f << "# slowpass " << kVersion << '\n';
    f << "# wall time " << g6(seconds) << " s, exit status " << status << '\n';
    f << "command = " << r.cmd.name << '\n';
    for (const auto& o : r.cmd.opts) {
        const std::string& val = r.v.at(o.key);
        if (!val.empty()) f << o.key << " = " << val << '\n';
    }
    f << "plot = " << (r.plot ? "true" : "false") << '\n';
}

/// Config entries become flags placed right after the subcommand, so that
/// later command-line flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args,
                                       const Command& cmd, std::size_t sub_pos) {
    std::string path;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i > sub_pos && args[i] == "--config") {
            if (i + 1 >= args.size()) throw UsageError("--config needs a file");
            if (!path.empty()) throw UsageError("--config given twice");
            path = args[++i];
            continue;
        }
        if (i > sub_pos && args[i].rfind("--config=", 0) == 0) {
            if (!path.empty()) throw UsageError("--config given twice");
            path = args[i].substr(9);
            continue;
        }
        rest.push_back(args[i]);
    }
    if (path.empty()) return rest;

    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config " + path);
    std::set<std::string> known;
    for (const auto& o : cmd.opts) known.insert(o.key);
    std::vector<std::string> tokens;
    for (const auto& [k, val] : parse_config(in)) {
        if (k == "command") {
            if (val != cmd.name) {
                throw UsageError("config is for '" + val + "', not '" + cmd.name + "'");
            }
        } else if (k == "plot") {
            if (val == "true") tokens.push_back("--plot");
            else if (val == "false") tokens.push_back("--no-plot");
            else throw UsageError("config: plot must be true or false");
        } else if (known.count(k)) {
            tokens.push_back("--" + k + "=" + val);
        } else {
            throw UsageError("config: unknown key '" + k + "' for " + cmd.name);
        }
    }
    rest.insert(rest.begin() + static_cast<std::ptrdiff_t>(sub_pos) + 1, tokens.begin(),
                tokens.end());
    return rest;
}

int dispatch(const std::vector<std::string>& raw, std::ostream& out, std::ostream& err) {
    const std::vector<Command> cmds = commands();

    std::size_t sub_pos = raw.size();
    const Command* chosen = nullptr;
    for (std::size_t i = 0; i < raw.size() && !chosen; ++i) {
        for (const auto& c : cmds) {
            if (raw[i] == c.name) {
                sub_pos = i;
                chosen = &c;
                break;
            }
        }
    }
    const std::vector<std::string> args =
        chosen ? expand_config(raw, *chosen, sub_pos) : raw;

    CLI::App app{"Discrete slow passage through a saddle-node bifurcation", "slowpass"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    std::map<std::string, std::map<std::string, std::string>> values;
    std::map<std::string, bool> plots;
    std::string ignored_config;
    for (const auto& c : cmds) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        auto& vals = values[c.name];
        for (const auto& o : c.opts) {
            vals[o.key] = o.def;
            std::string help = o.help;
            if (!o.def.empty()) help += " [" + o.def + "]";
            sub->add_option("--" + o.key, vals[o.key], help)
                ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)
                ->allow_extra_args(false);
        }
        plots[c.name] = true;
        sub->add_flag("--plot,!--no-plot", plots[c.name], "write SVG plots [on]")
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        sub->add_option("--config", ignored_config, "flat key = value file; flags override it");
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, er;
        const int code = app.exit(e, o, er);
        out << o.str();
        err << er.str();
        return code == 0 ? kOk : kUsage;
    }
    if (!chosen) {
        err << "no subcommand given\n";
        return kUsage;
    }

    Run run(*chosen, out, err);
    run.v = values[chosen->name];
    run.plot = plots[chosen->name];
    run.dir = run.v["out"];

    const auto start = std::chrono::steady_clock::now();
    int status = kOk;
    try {
        run.threads();
        fs::create_directories(run.dir);
        status = chosen->body(run);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        status = kNumerical;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(run, secs, status);
    return status;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(args, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
}

} // namespace slowpass::cli

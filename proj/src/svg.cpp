#include "slowpass/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace slowpass::svg {

namespace {

constexpr int kMarginL = 70, kMarginR = 20, kMarginT = 36, kMarginB = 50;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Axis {
    bool log = false;
    double lo = 0.0, hi = 1.0;
    double px_lo = 0.0, px_hi = 1.0;

    double tf(double v) const { return log ? std::log10(v) : v; }
    double map(double v) const {
        const double a = tf(lo), b = tf(hi);
        return px_lo + (tf(v) - a) / (b - a) * (px_hi - px_lo);
    }
    bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }

    std::vector<double> ticks() const {
        std::vector<double> t;
        if (log) {
            for (double e = std::floor(std::log10(lo)); e <= std::ceil(std::log10(hi)); e += 1.0) {
                const double v = std::pow(10.0, e);
                if (v >= lo * (1 - 1e-12) && v <= hi * (1 + 1e-12)) t.push_back(v);
            }
            if (t.size() < 2) t = {lo, hi};
        } else {
            for (int i = 0; i <= 5; ++i) t.push_back(lo + (hi - lo) * i / 5.0);
        }
        return t;
    }
};

void fit_range(Axis& ax, const std::vector<double>& vals) {
    double lo = INFINITY, hi = -INFINITY;
    for (double v : vals) {
        if (!ax.usable(v)) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!(lo <= hi)) {
        lo = ax.log ? 0.1 : 0.0;
        hi = 1.0;
    }
    if (lo == hi) {
        if (ax.log) {
            lo /= 2.0;
            hi *= 2.0;
        } else {
            lo -= 0.5;
            hi += 0.5;
        }
    } else if (!ax.log) {
        const double pad = 0.03 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
    ax.lo = lo;
    ax.hi = hi;
}

void frame(std::ostringstream& os, const Plot& p, const Axis& ax, const Axis& ay) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << p.width << "\" height=\""
       << p.height << "\" viewBox=\"0 0 " << p.width << ' ' << p.height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << p.width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
       << escape(p.title) << "</text>\n";
    os << "<rect x=\"" << kMarginL << "\" y=\"" << kMarginT << "\" width=\""
       << p.width - kMarginL - kMarginR << "\" height=\"" << p.height - kMarginT - kMarginB
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : ax.ticks()) {
        const double x = ax.map(t);
        os << "<line x1=\"" << num(x) << "\" y1=\"" << p.height - kMarginB << "\" x2=\"" << num(x)
           << "\" y2=\"" << p.height - kMarginB + 5 << "\" stroke=\"black\"/>";
        os << "<text x=\"" << num(x) << "\" y=\"" << p.height - kMarginB + 18
           << "\" text-anchor=\"middle\" font-size=\"11\">" << tick_label(t) << "</text>\n";
    }
    for (double t : ay.ticks()) {
        const double y = ay.map(t);
        os << "<line x1=\"" << kMarginL - 5 << "\" y1=\"" << num(y) << "\" x2=\"" << kMarginL
           << "\" y2=\"" << num(y) << "\" stroke=\"black\"/>";
        os << "<text x=\"" << kMarginL - 8 << "\" y=\"" << num(y + 4)
           << "\" text-anchor=\"end\" font-size=\"11\">" << tick_label(t) << "</text>\n";
    }
    os << "<text x=\"" << (kMarginL + p.width - kMarginR) / 2 << "\" y=\"" << p.height - 10
       << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(p.x_label) << "</text>\n";
    os << "<text x=\"16\" y=\"" << (kMarginT + p.height - kMarginB) / 2
       << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
       << (kMarginT + p.height - kMarginB) / 2 << ")\">" << escape(p.y_label) << "</text>\n";
}

Axis make_x(const Plot& p) {
    Axis a;
    a.log = p.log_x;
    a.px_lo = kMarginL;
    a.px_hi = p.width - kMarginR;
    return a;
}

Axis make_y(const Plot& p) {
    Axis a;
    a.log = p.log_y;
    a.px_lo = p.height - kMarginB;
    a.px_hi = kMarginT;
    return a;
}

} // namespace

std::string render(const Plot& plot) {
    Axis ax = make_x(plot), ay = make_y(plot);
    std::vector<double> xs, ys;
    for (const auto& s : plot.series) {
        xs.insert(xs.end(), s.x.begin(), s.x.end());
        ys.insert(ys.end(), s.y.begin(), s.y.end());
    }
    fit_range(ax, xs);
    fit_range(ay, ys);

    std::ostringstream os;
    frame(os, plot, ax, ay);
    int legend_y = kMarginT + 16;
    for (const auto& s : plot.series) {
        const std::size_t n = std::min(s.x.size(), s.y.size());
        if (s.markers) {
            for (std::size_t i = 0; i < n; ++i) {
                if (!ax.usable(s.x[i]) || !ay.usable(s.y[i])) continue;
                os << "<circle cx=\"" << num(ax.map(s.x[i])) << "\" cy=\"" << num(ay.map(s.y[i]))
                   << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
            }
        } else {
            os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
            if (s.dashed) os << " stroke-dasharray=\"6 4\"";
            os << " points=\"";
            for (std::size_t i = 0; i < n; ++i) {
                if (!ax.usable(s.x[i]) || !ay.usable(s.y[i])) continue;
                os << num(ax.map(s.x[i])) << ',' << num(ay.map(s.y[i])) << ' ';
            }
            os << "\"/>\n";
        }
        if (!s.name.empty()) {
            os << "<text x=\"" << plot.width - kMarginR - 8 << "\" y=\"" << legend_y
               << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << s.color << "\">"
               << escape(s.name) << "</text>\n";
            legend_y += 16;
        }
    }
    os << "</svg>\n";
    return os.str();
}

std::string render_region_raster(const RegionMap& map, const std::string& title) {
    Plot p;
    p.title = title;
    p.x_label = "epsilon";
    p.y_label = "dt";
    p.log_x = p.log_y = true;
    p.width = 640;
    p.height = 600;
    Axis ax = make_x(p), ay = make_y(p);
    fit_range(ax, map.eps_values);
    fit_range(ay, map.dt_values);

    auto edges = [](const std::vector<double>& v, std::size_t i) {
        const double lo = i == 0 ? v[0] * v[0] / v[std::min<std::size_t>(1, v.size() - 1)]
                                 : v[i - 1];
        const double hi = i + 1 == v.size() ? v[i] * v[i] / v[i == 0 ? 0 : i - 1] : v[i + 1];
        return std::pair{std::sqrt(lo * v[i]), std::sqrt(v[i] * hi)};
    };

    std::ostringstream os;
    frame(os, p, ax, ay);
    const std::size_t ne = map.eps_values.size(), nd = map.dt_values.size();
    if (ne > 0 && nd > 0) {
        os << "<g shape-rendering=\"crispEdges\">\n";
        for (std::size_t i = 0; i < ne; ++i) {
            auto [e0, e1] = edges(map.eps_values, i);
            const double x0 = std::max(ax.map(std::max(e0, ax.lo)), ax.px_lo);
            const double x1 = std::min(ax.map(std::min(e1, ax.hi)), ax.px_hi);
            for (std::size_t j = 0; j < nd; ++j) {
                auto [d0, d1] = edges(map.dt_values, j);
                const double y0 = ay.map(std::min(d1, ay.hi));
                const double y1 = ay.map(std::max(d0, ay.lo));
                const char* color = "#dddddd";
                switch (map.at(i, j).cls) {
                case SolutionClass::TypeI: color = "#4c72b0"; break;
                case SolutionClass::TypeII: color = "#55a868"; break;
                case SolutionClass::TypeIII: color = "#c44e52"; break;
                case SolutionClass::Unclassified: break;
                }
                os << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\""
                   << num(std::max(x1 - x0, 0.0)) << "\" height=\"" << num(std::max(y1 - y0, 0.0))
                   << "\" fill=\"" << color << "\"/>\n";
            }
        }
        os << "</g>\n";
    }
    const char* names[] = {"type I", "type II", "type III"};
    const char* colors[] = {"#4c72b0", "#55a868", "#c44e52"};
    for (int k = 0; k < 3; ++k) {
        os << "<text x=\"" << p.width - kMarginR - 8 << "\" y=\"" << kMarginT + 16 + 16 * k
           << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << colors[k] << "\">" << names[k]
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace slowpass::svg

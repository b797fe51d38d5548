#include "pinnlab/plot.hpp"

#include "pinnlab/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace pinnlab {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 36, kBottom = 50;

const std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                             "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&':
                out += "&amp;";
                break;
            case '<':
                out += "&lt;";
                break;
            case '>':
                out += "&gt;";
                break;
            default:
                out += c;
        }
    }
    return out;
}

void header(std::ostringstream& os, const std::string& title) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
       << "</text>\n";
}

// Viridis-like ramp through five anchors.
std::string colour(double s) {
    static const double anchors[5][3] = {
        {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
    s = std::clamp(s, 0.0, 1.0) * 4.0;
    const int k = std::min(3, int(s));
    const double f = s - k;
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", int(std::lround(anchors[k][0] + f * (anchors[k + 1][0] - anchors[k][0]))),
                  int(std::lround(anchors[k][1] + f * (anchors[k + 1][1] - anchors[k][1]))),
                  int(std::lround(anchors[k][2] + f * (anchors[k + 1][2] - anchors[k][2]))));
    return buf;
}

struct Axis {
    double lo, hi;
    bool log;

    double map(double v) const { return log ? std::log10(v) : v; }
    double frac(double v) const { return hi > lo ? (map(v) - lo) / (hi - lo) : 0.5; }
};

Axis make_axis(const std::vector<const std::vector<double>*>& data, bool log) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto* d : data)
        for (double v : *d) {
            if (!std::isfinite(v) || (log && v <= 0.0)) continue;
            const double m = log ? std::log10(v) : v;
            lo = std::min(lo, m);
            hi = std::max(hi, m);
        }
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
    const double pad = 0.04 * (hi - lo);
    return {lo - pad, hi + pad, log};
}

void axes(std::ostringstream& os, const Axis& ax, const Axis& ay, const std::string& xl, const std::string& yl) {
    const double w = kWidth - kLeft - kRight, h = kHeight - kTop - kBottom;
    os << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(w) << "\" height=\"" << num(h)
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double f = k / 4.0;
        const double vx = ax.lo + f * (ax.hi - ax.lo), vy = ay.lo + f * (ay.hi - ay.lo);
        const double px = kLeft + f * w, py = kTop + h - f * h;
        os << "<text x=\"" << num(px) << "\" y=\"" << num(kTop + h + 16) << "\" text-anchor=\"middle\">"
           << tick(ax.log ? std::pow(10.0, vx) : vx) << "</text>\n";
        os << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py + 4) << "\" text-anchor=\"end\">"
           << tick(ay.log ? std::pow(10.0, vy) : vy) << "</text>\n";
    }
    os << "<text x=\"" << num(kLeft + w / 2) << "\" y=\"" << num(kHeight - 10) << "\" text-anchor=\"middle\">"
       << escape(xl) << "</text>\n";
    os << "<text x=\"16\" y=\"" << num(kTop + h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << num(kTop + h / 2) << ")\">" << escape(yl) << "</text>\n";
}

}  // namespace

std::string svg_heatmap(const SolutionField& field, const std::string& title) {
    const Grid& g = field.grid;
    const double w = kWidth - kLeft - kRight, h = kHeight - kTop - kBottom;
    const double vmin = field.values.minCoeff(), vmax = field.values.maxCoeff();
    // Downsample very fine grids so files stay small.
    const Eigen::Index sx = std::max<Eigen::Index>(1, g.nx / 200), st = std::max<Eigen::Index>(1, g.nt / 120);
    const Eigen::Index cx = (g.nx + sx - 1) / sx, ct = (g.nt + st - 1) / st;
    std::ostringstream os;
    header(os, title + "  [" + tick(vmin) + ", " + tick(vmax) + "]");
    const double cw = w / double(cx), ch = h / double(ct);
    for (Eigen::Index j = 0; j < ct; ++j)
        for (Eigen::Index i = 0; i < cx; ++i) {
            const double v = field.values(i * sx, j * st);
            const double s = vmax > vmin ? (v - vmin) / (vmax - vmin) : 0.5;
            os << "<rect x=\"" << num(kLeft + i * cw) << "\" y=\"" << num(kTop + h - (j + 1) * ch) << "\" width=\""
               << num(cw + 0.05) << "\" height=\"" << num(ch + 0.05) << "\" fill=\"" << colour(s) << "\"/>\n";
        }
    axes(os, {g.x_lo, g.x_hi, false}, {g.t_lo, g.t_hi, false}, "x", "t");
    os << "</svg>\n";
    return os.str();
}

std::string svg_plot(const std::vector<Curve>& curves, const PlotSpec& spec) {
    std::vector<const std::vector<double>*> xs, ys;
    for (const auto& c : curves) {
        xs.push_back(&c.x);
        ys.push_back(&c.y);
    }
    const Axis ax = make_axis(xs, spec.log_x), ay = make_axis(ys, spec.log_y);
    const double w = kWidth - kLeft - kRight, h = kHeight - kTop - kBottom;
    auto px = [&](double v) { return kLeft + ax.frac(v) * w; };
    auto py = [&](double v) { return kTop + h - ay.frac(v) * h; };
    auto usable = [&](double x, double y) {
        return std::isfinite(x) && std::isfinite(y) && (!spec.log_x || x > 0) && (!spec.log_y || y > 0);
    };

    std::ostringstream os;
    header(os, spec.title);
    axes(os, ax, ay, spec.xlabel, spec.ylabel);
    for (std::size_t k = 0; k < curves.size(); ++k) {
        const Curve& c = curves[k];
        const char* col = kPalette[k % kPalette.size()];
        const std::size_t n = std::min(c.x.size(), c.y.size());
        if (spec.scatter) {
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            int m = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (!usable(c.x[i], c.y[i])) continue;
                os << "<circle cx=\"" << num(px(c.x[i])) << "\" cy=\"" << num(py(c.y[i])) << "\" r=\"3.5\" fill=\""
                   << col << "\"/>\n";
                const double u = ax.map(c.x[i]), v = ay.map(c.y[i]);
                sx += u, sy += v, sxx += u * u, sxy += u * v, ++m;
            }
            if (m >= 2 && m * sxx - sx * sx > 0) {
                const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx), icpt = (sy - slope * sx) / m;
                const double u0 = ax.lo, u1 = ax.hi;
                auto inv = [](const Axis& a, double u) { return a.log ? std::pow(10.0, u) : u; };
                os << "<line x1=\"" << num(px(inv(ax, u0))) << "\" y1=\"" << num(py(inv(ay, icpt + slope * u0)))
                   << "\" x2=\"" << num(px(inv(ax, u1))) << "\" y2=\"" << num(py(inv(ay, icpt + slope * u1)))
                   << "\" stroke=\"" << col << "\" stroke-dasharray=\"5,3\"/>\n";
                os << "<text x=\"" << num(kLeft + 8) << "\" y=\"" << num(kTop + 16 + 14 * double(k)) << "\" fill=\""
                   << col << "\">" << escape(c.label) << "  slope " << tick(slope) << "</text>\n";
                continue;
            }
        } else {
            os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < n; ++i)
                if (usable(c.x[i], c.y[i])) os << num(px(c.x[i])) << ',' << num(py(c.y[i])) << ' ';
            os << "\"/>\n";
        }
        os << "<text x=\"" << num(kLeft + 8) << "\" y=\"" << num(kTop + 16 + 14 * double(k)) << "\" fill=\"" << col
           << "\">" << escape(c.label) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::vector<std::filesystem::path> emit_plots(const ExperimentReport& report, const std::filesystem::path& dir,
                                              std::vector<std::string>* warnings) {
    std::vector<std::filesystem::path> written;
    for (const auto& [name, field] : report.fields) {
        const auto file = dir / (name + ".svg");
        write_text(file, svg_heatmap(field, report.id + ": " + name));
        written.push_back(file);
    }
    for (const auto& spec : report.plots) {
        const auto xs = report.series.find(spec.x_series);
        std::vector<Curve> curves;
        bool missing = xs == report.series.end();
        for (const auto& y : spec.y_series) {
            const auto ys = report.series.find(y);
            if (ys == report.series.end()) {
                missing = true;
                break;
            }
            if (!missing) curves.push_back({y, xs->second, ys->second});
        }
        if (missing || curves.empty()) {
            if (warnings) warnings->push_back("plot '" + spec.name + "' skipped: series missing");
            continue;
        }
        const auto file = dir / (spec.name + ".svg");
        write_text(file, svg_plot(curves, spec));
        written.push_back(file);
    }
    return written;
}

}  // namespace pinnlab

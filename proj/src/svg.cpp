#include "armsynth/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace armsynth {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    if (std::string(buf) == "-0.00") return "0.00";
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", std::abs(v) < 1e-12 ? 0.0 : v);
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

double nice_step(double span, int target_ticks) {
    const double raw = span / std::max(target_ticks, 1);
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    return (r <= 1.0 ? 1.0 : r <= 2.0 ? 2.0 : r <= 5.0 ? 5.0 : 10.0) * mag;
}

struct Axis {
    double lo{0.0}, hi{1.0}, step{0.2};

    static Axis fit(double lo, double hi) {
        if (!(hi > lo)) {
            const double pad = std::max(std::abs(lo) * 0.1, 1e-3);
            lo -= pad;
            hi += pad;
        }
        Axis a;
        a.step = nice_step(hi - lo, 5);
        a.lo = std::floor(lo / a.step) * a.step;
        a.hi = std::ceil(hi / a.step) * a.step;
        return a;
    }
};

// Linear map of a data rectangle into a pixel rectangle (y up).
struct Frame {
    double x0, y0, w, h;
    double dx_lo, dx_hi, dy_lo, dy_hi;

    double px(double x) const { return x0 + (x - dx_lo) / (dx_hi - dx_lo) * w; }
    double py(double y) const { return y0 + h - (y - dy_lo) / (dy_hi - dy_lo) * h; }
};

void header(std::ostringstream& os, int width, int height) {
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\">\n";
    os << "  <rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
}

void axes(std::ostringstream& os, const Frame& f, const Axis& ax, const Axis& ay, const std::string& xlabel,
          const std::string& ylabel) {
    os << "  <g id=\"axes\" stroke=\"#444\" stroke-width=\"1\" fill=\"none\">\n";
    os << "    <rect x=\"" << fmt(f.x0) << "\" y=\"" << fmt(f.y0) << "\" width=\"" << fmt(f.w) << "\" height=\""
       << fmt(f.h) << "\"/>\n";
    os << "  </g>\n  <g id=\"ticks\" font-size=\"11\" fill=\"#222\">\n";
    const int nx = static_cast<int>(std::lround((ax.hi - ax.lo) / ax.step));
    for (int i = 0; i <= nx; ++i) {
        const double v = ax.lo + i * ax.step;
        const double x = f.px(v);
        os << "    <line x1=\"" << fmt(x) << "\" y1=\"" << fmt(f.y0 + f.h) << "\" x2=\"" << fmt(x) << "\" y2=\""
           << fmt(f.y0 + f.h + 5) << "\" stroke=\"#444\"/>\n";
        os << "    <text x=\"" << fmt(x) << "\" y=\"" << fmt(f.y0 + f.h + 18) << "\" text-anchor=\"middle\">"
           << tick_label(v) << "</text>\n";
    }
    const int ny = static_cast<int>(std::lround((ay.hi - ay.lo) / ay.step));
    for (int i = 0; i <= ny; ++i) {
        const double v = ay.lo + i * ay.step;
        const double y = f.py(v);
        os << "    <line x1=\"" << fmt(f.x0 - 5) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(f.x0) << "\" y2=\""
           << fmt(y) << "\" stroke=\"#444\"/>\n";
        os << "    <text x=\"" << fmt(f.x0 - 8) << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\">"
           << tick_label(v) << "</text>\n";
    }
    os << "    <text x=\"" << fmt(f.x0 + f.w / 2) << "\" y=\"" << fmt(f.y0 + f.h + 38)
       << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(xlabel) << "</text>\n";
    os << "    <text transform=\"translate(" << fmt(f.x0 - 58) << ',' << fmt(f.y0 + f.h / 2)
       << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"13\">" << escape(ylabel) << "</text>\n";
    os << "  </g>\n";
}

}  // namespace

std::string scatter_svg(const ScatterData& data) {
    constexpr int kWidth = 640, kHeight = 480;
    double xlo = 0.0, xhi = 0.0, ylo = 0.0, yhi = 0.0;
    bool any = false;
    for (const auto* set : {&data.trials, &data.front})
        for (const auto& p : *set) {
            xlo = any ? std::min(xlo, p.e_x) : p.e_x;
            xhi = any ? std::max(xhi, p.e_x) : p.e_x;
            ylo = any ? std::min(ylo, p.e_tau) : p.e_tau;
            yhi = any ? std::max(yhi, p.e_tau) : p.e_tau;
            any = true;
        }
    const Axis ax = Axis::fit(std::min(0.0, xlo), any ? xhi : 1.0);
    const Axis ay = Axis::fit(std::min(0.0, ylo), any ? yhi : 1.0);
    const Frame f{80.0, 40.0, kWidth - 110.0, kHeight - 100.0, ax.lo, ax.hi, ay.lo, ay.hi};

    std::ostringstream os;
    header(os, kWidth, kHeight);
    os << "  <text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(data.title)
       << "</text>\n";
    axes(os, f, ax, ay, "E_x [m]", "E_tau [N m]");

    os << "  <g id=\"trials\" fill=\"#9aa7b8\" fill-opacity=\"0.6\">\n";
    for (const auto& p : data.trials)
        os << "    <circle cx=\"" << fmt(f.px(p.e_x)) << "\" cy=\"" << fmt(f.py(p.e_tau)) << "\" r=\"2\"/>\n";
    os << "  </g>\n";

    os << "  <g id=\"front\" fill=\"#d62728\" stroke=\"#d62728\">\n";
    if (data.front.size() > 1) {
        os << "    <polyline fill=\"none\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < data.front.size(); ++i) {
            const auto& p = data.front[i];
            if (i > 0) os << ' ' << fmt(f.px(p.e_x)) << ',' << fmt(f.py(data.front[i - 1].e_tau)) << ' ';
            os << fmt(f.px(p.e_x)) << ',' << fmt(f.py(p.e_tau));
        }
        os << "\"/>\n";
    }
    for (const auto& p : data.front)
        os << "    <circle cx=\"" << fmt(f.px(p.e_x)) << "\" cy=\"" << fmt(f.py(p.e_tau)) << "\" r=\"4\"><title>trial "
           << p.id << "</title></circle>\n";
    os << "  </g>\n";

    os << "  <g id=\"legend\" font-size=\"11\">\n";
    os << "    <text x=\"" << kWidth - 30 << "\" y=\"56\" text-anchor=\"end\">" << data.trials.size() << " feasible, "
       << data.infeasible << " infeasible, " << data.front.size() << " on front</text>\n";
    os << "  </g>\n</svg>\n";
    return os.str();
}

std::string skeleton_svg(const std::string& title, const std::vector<Skeleton>& designs,
                         const std::vector<Vec3>& targets) {
    constexpr double kPanel = 220.0, kGap = 20.0;
    const int cols = 2;  // top view, side view
    const int rows = std::max<int>(1, static_cast<int>(designs.size()));
    const int width = static_cast<int>(cols * kPanel + (cols + 1) * kGap);
    const int height = static_cast<int>(40 + rows * (kPanel + 2 * kGap));

    // One shared scale so panels are comparable.
    Vec3 lo = Vec3::Constant(0.0), hi = Vec3::Constant(0.0);
    bool any = false;
    auto grow = [&](const Vec3& p) {
        lo = any ? lo.cwiseMin(p) : p;
        hi = any ? hi.cwiseMax(p) : p;
        any = true;
    };
    for (const auto& t : targets) grow(t);
    for (const auto& d : designs)
        for (const auto& chain : d.chains)
            for (const auto& p : chain) grow(p);
    const Vec3 center = 0.5 * (lo + hi);
    const double half = std::max(0.55 * (hi - lo).maxCoeff(), 0.05);

    std::ostringstream os;
    header(os, width, height);
    os << "  <text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
       << "</text>\n";
    if (designs.empty())
        os << "  <text x=\"" << width / 2 << "\" y=\"" << height / 2
           << "\" text-anchor=\"middle\" font-size=\"13\">no feasible design</text>\n";

    static const char* kViews[2] = {"top (x-y)", "side (x-z)"};
    static const char* kPalette[6] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#17becf"};
    for (std::size_t r = 0; r < designs.size(); ++r) {
        const auto& d = designs[r];
        const double top = 40.0 + static_cast<double>(r) * (kPanel + 2 * kGap) + kGap;
        os << "  <g id=\"design-" << r << "\">\n";
        os << "    <text x=\"" << fmt(kGap) << "\" y=\"" << fmt(top - 4) << "\" font-size=\"12\">" << escape(d.label)
           << "</text>\n";
        for (int c = 0; c < cols; ++c) {
            const int vertical = c == 0 ? 1 : 2;
            const double left = kGap + c * (kPanel + kGap);
            const Frame f{left, top + 10, kPanel, kPanel - 10, center.x() - half, center.x() + half,
                          center[vertical] - half, center[vertical] + half};
            os << "    <rect x=\"" << fmt(f.x0) << "\" y=\"" << fmt(f.y0) << "\" width=\"" << fmt(f.w)
               << "\" height=\"" << fmt(f.h) << "\" fill=\"none\" stroke=\"#bbb\"/>\n";
            os << "    <text x=\"" << fmt(f.x0 + f.w - 4) << "\" y=\"" << fmt(f.y0 + 12)
               << "\" text-anchor=\"end\" font-size=\"10\" fill=\"#666\">" << kViews[c] << "</text>\n";
            for (const auto& t : targets) {
                const double x = f.px(t.x()), y = f.py(t[vertical]);
                os << "    <path d=\"M" << fmt(x - 4) << ' ' << fmt(y - 4) << " L" << fmt(x + 4) << ' ' << fmt(y + 4)
                   << " M" << fmt(x - 4) << ' ' << fmt(y + 4) << " L" << fmt(x + 4) << ' ' << fmt(y - 4)
                   << "\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n";
            }
            for (std::size_t k = 0; k < d.chains.size(); ++k) {
                const auto& chain = d.chains[k];
                os << "    <polyline fill=\"none\" stroke=\"" << kPalette[k % 6]
                   << "\" stroke-width=\"2\" stroke-linejoin=\"round\" points=\"";
                for (std::size_t i = 0; i < chain.size(); ++i)
                    os << (i ? " " : "") << fmt(f.px(chain[i].x())) << ',' << fmt(f.py(chain[i][vertical]));
                os << "\"/>\n";
                for (std::size_t i = 0; i + 1 < chain.size(); ++i)
                    os << "    <circle cx=\"" << fmt(f.px(chain[i].x())) << "\" cy=\"" << fmt(f.py(chain[i][vertical]))
                       << "\" r=\"2.5\" fill=\"#333\"/>\n";
            }
        }
        os << "  </g>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace armsynth

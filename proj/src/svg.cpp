#include "tripletforge/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "tripletforge/errors.hpp"

namespace tripletforge::svg {

namespace {

constexpr double kW = 640, kH = 440, kL = 80, kR = 20, kT = 40, kB = 60;
const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string num(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.4g", v);
    return b;
}

std::string esc(const std::string& s) {
    std::string o;
    for (char c : s) {
        if (c == '<') o += "&lt;";
        else if (c == '>') o += "&gt;";
        else if (c == '&') o += "&amp;";
        else o += c;
    }
    return o;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity(), hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    bool valid() const { return lo <= hi; }
    void widen() {
        if (!valid()) lo = 0, hi = 1;
        if (hi == lo) hi = lo + (lo == 0 ? 1.0 : std::abs(lo) * 0.1);
    }
};

void frame(std::ostringstream& o, const Axes& ax, Range xr, Range yr, bool log_y) {
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << esc(ax.title) << "</text>\n";
    o << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << kW - kL - kR << "\" height=\"" << kH - kT - kB
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = i / 4.0;
        const double px = kL + fx * (kW - kL - kR);
        o << "<text x=\"" << px << "\" y=\"" << kH - kB + 16 << "\" text-anchor=\"middle\">"
          << num(xr.lo + fx * (xr.hi - xr.lo)) << "</text>\n";
        const double py = kH - kB - fx * (kH - kT - kB);
        double yv = yr.lo + fx * (yr.hi - yr.lo);
        if (log_y) yv = std::pow(10.0, yv);
        o << "<text x=\"" << kL - 6 << "\" y=\"" << py + 4 << "\" text-anchor=\"end\">" << num(yv) << "</text>\n";
    }
    o << "<text x=\"" << (kL + kW - kR) / 2 << "\" y=\"" << kH - 16 << "\" text-anchor=\"middle\">" << esc(ax.xlabel)
      << "</text>\n";
    o << "<text transform=\"translate(16," << (kT + kH - kB) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << esc(ax.ylabel) << "</text>\n";
}

void save(const std::filesystem::path& path, const std::string& s) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path.string());
    f << s;
}

}  // namespace

void line_plot(const std::filesystem::path& path, const Axes& ax, const std::vector<Series>& series) {
    Range xr, yr;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) throw ValidationError("plot series '" + s.name + "' has mismatched x/y");
        for (double v : s.x) xr.add(v);
        for (double v : s.y) {
            if (ax.log_y) {
                if (v > 0) yr.add(std::log10(v));
            } else {
                yr.add(v);
            }
        }
    }
    xr.widen();
    yr.widen();
    std::ostringstream o;
    frame(o, ax, xr, yr, ax.log_y);
    const double pw = kW - kL - kR, ph = kH - kT - kB;
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kColors[k % 6];
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double y = s.y[i];
            if (ax.log_y) {
                if (!(y > 0)) continue;
                y = std::log10(y);
            }
            if (!std::isfinite(y)) continue;
            const double px = kL + (s.x[i] - xr.lo) / (xr.hi - xr.lo) * pw;
            const double py = kH - kB - (y - yr.lo) / (yr.hi - yr.lo) * ph;
            o << num(px) << "," << num(py) << " ";
        }
        o << "\"/>\n";
        o << "<text x=\"" << kW - kR - 8 << "\" y=\"" << kT + 16 + 14 * k << "\" text-anchor=\"end\" fill=\"" << color
          << "\">" << esc(s.name) << "</text>\n";
    }
    o << "</svg>\n";
    save(path, o.str());
}

void heatmap(const std::filesystem::path& path, const Axes& ax, const std::vector<double>& x,
             const std::vector<double>& y, const std::vector<double>& values, bool log_scale) {
    if (x.empty() || y.empty() || values.size() != x.size() * y.size())
        throw ValidationError("heatmap dimensions do not match the value count");
    Range xr, yr, vr;
    for (double v : x) xr.add(v);
    for (double v : y) yr.add(v);
    xr.widen();
    yr.widen();
    double vmax = 0.0;
    for (double v : values)
        if (std::isfinite(v)) vmax = std::max(vmax, v);
    auto level = [&](double v) {
        if (!(vmax > 0) || !std::isfinite(v) || v <= 0) return 0.0;
        if (log_scale) return std::clamp(1.0 + std::log10(v / vmax) / 6.0, 0.0, 1.0);
        return std::clamp(v / vmax, 0.0, 1.0);
    };
    std::ostringstream o;
    Axes a = ax;
    frame(o, a, xr, yr, false);
    const double pw = kW - kL - kR, ph = kH - kT - kB;
    const double cw = pw / static_cast<double>(x.size()), ch = ph / static_cast<double>(y.size());
    // Cells are placed by index; axis labels give the node range.
    for (std::size_t iy = 0; iy < y.size(); ++iy) {
        for (std::size_t ix = 0; ix < x.size(); ++ix) {
            const double v = values[iy * x.size() + ix];
            if (std::isnan(v)) continue;
            const double t = level(v);
            const int r = static_cast<int>(255 * std::min(1.0, 2.0 * t));
            const int g = static_cast<int>(255 * std::max(0.0, 2.0 * t - 1.0));
            const int b = static_cast<int>(255 * (1.0 - t) * 0.6);
            char col[8];
            std::snprintf(col, sizeof col, "#%02x%02x%02x", r, g, b);
            o << "<rect x=\"" << num(kL + ix * cw) << "\" y=\"" << num(kH - kB - (iy + 1) * ch) << "\" width=\""
              << num(cw + 0.3) << "\" height=\"" << num(ch + 0.3) << "\" fill=\"" << col << "\"/>\n";
        }
    }
    o << "<text x=\"" << kW - kR << "\" y=\"" << kT - 6 << "\" text-anchor=\"end\" font-size=\"10\">max "
      << num(vmax) << (log_scale ? ", 6 decades" : "") << "</text>\n";
    o << "</svg>\n";
    save(path, o.str());
}

}  // namespace tripletforge::svg

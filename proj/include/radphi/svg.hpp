#pragma once

#include <radphi/util.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace radphi {

// Minimal deterministic SVG line/scatter plotter: fixed canvas, computed
// axes, no timestamps or external assets, so identical inputs produce
// byte-identical files.
class SvgPlot {
public:
    SvgPlot(int width = 720, int height = 480) : width_(width), height_(height) {}

    void set_title(std::string t) { title_ = std::move(t); }
    void set_xlabel(std::string t) { xlabel_ = std::move(t); }
    void set_ylabel(std::string t) { ylabel_ = std::move(t); }
    void set_logx(bool on) { logx_ = on; }

    void add_line(std::vector<double> x, std::vector<double> y, std::string color,
                  double stroke = 1.5) {
        if (x.size() != y.size())
            throw std::invalid_argument("SvgPlot: series lengths differ");
        series_.push_back({std::move(x), std::move(y), std::move(color), stroke, false});
    }

    void add_points(std::vector<double> x, std::vector<double> y, std::string color,
                    double radius = 3.0) {
        if (x.size() != y.size())
            throw std::invalid_argument("SvgPlot: series lengths differ");
        series_.push_back({std::move(x), std::move(y), std::move(color), radius, true});
    }

    void add_vline(double x, std::string color) { vlines_.push_back({x, std::move(color)}); }
    void add_hline(double y, std::string color) { hlines_.push_back({y, std::move(color)}); }

    void render(std::ostream& os) const {
        double xlo = 0.0, xhi = 1.0, ylo = 0.0, yhi = 1.0;
        bool first = true;
        for (const auto& s : series_) {
            for (size_t i = 0; i < s.x.size(); ++i) {
                const double xv = tx(s.x[i]);
                if (!std::isfinite(xv) || !std::isfinite(s.y[i])) continue;
                if (first) {
                    xlo = xhi = xv;
                    ylo = yhi = s.y[i];
                    first = false;
                } else {
                    xlo = std::min(xlo, xv);
                    xhi = std::max(xhi, xv);
                    ylo = std::min(ylo, s.y[i]);
                    yhi = std::max(yhi, s.y[i]);
                }
            }
        }
        for (const auto& v : hlines_) {
            ylo = std::min(ylo, v.at);
            yhi = std::max(yhi, v.at);
        }
        for (const auto& v : vlines_) {
            xlo = std::min(xlo, tx(v.at));
            xhi = std::max(xhi, tx(v.at));
        }
        if (xhi - xlo < 1e-300) { xlo -= 1.0; xhi += 1.0; }
        if (yhi - ylo < 1e-300) { ylo -= 1.0; yhi += 1.0; }
        const double xpad = 0.04 * (xhi - xlo), ypad = 0.06 * (yhi - ylo);
        xlo -= xpad; xhi += xpad; ylo -= ypad; yhi += ypad;

        const double L = 64, R = 16, T = title_.empty() ? 16 : 32, B = 44;
        const double pw = width_ - L - R, ph = height_ - T - B;
        auto X = [&](double x) { return L + (tx(x) - xlo) / (xhi - xlo) * pw; };
        auto Y = [&](double y) { return T + (yhi - y) / (yhi - ylo) * ph; };

        os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_
           << "\" height=\"" << height_ << "\" viewBox=\"0 0 " << width_ << ' '
           << height_ << "\">\n";
        os << "<rect width=\"" << width_ << "\" height=\"" << height_
           << "\" fill=\"white\"/>\n";

        // Axes box and ticks.
        os << "<rect x=\"" << f2(L) << "\" y=\"" << f2(T) << "\" width=\"" << f2(pw)
           << "\" height=\"" << f2(ph)
           << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
        for (double t : (logx_ ? log_ticks(xlo, xhi) : nice_ticks(xlo, xhi))) {
            const double px = L + (t - xlo) / (xhi - xlo) * pw;
            os << "<line x1=\"" << f2(px) << "\" y1=\"" << f2(T + ph) << "\" x2=\""
               << f2(px) << "\" y2=\"" << f2(T + ph + 5)
               << "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
            os << "<text x=\"" << f2(px) << "\" y=\"" << f2(T + ph + 18)
               << "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\">"
               << g6(logx_ ? std::pow(10.0, t) : t) << "</text>\n";
        }
        for (double t : nice_ticks(ylo, yhi)) {
            const double py = T + (yhi - t) / (yhi - ylo) * ph;
            os << "<line x1=\"" << f2(L - 5) << "\" y1=\"" << f2(py) << "\" x2=\""
               << f2(L) << "\" y2=\"" << f2(py)
               << "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
            os << "<text x=\"" << f2(L - 8) << "\" y=\"" << f2(py + 4)
               << "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">"
               << g6(t) << "</text>\n";
        }

        for (const auto& v : vlines_) {
            const double px = X(v.at);
            os << "<line x1=\"" << f2(px) << "\" y1=\"" << f2(T) << "\" x2=\"" << f2(px)
               << "\" y2=\"" << f2(T + ph) << "\" stroke=\"" << v.color
               << "\" stroke-width=\"1\" stroke-dasharray=\"5,4\"/>\n";
        }
        for (const auto& v : hlines_) {
            const double py = Y(v.at);
            os << "<line x1=\"" << f2(L) << "\" y1=\"" << f2(py) << "\" x2=\""
               << f2(L + pw) << "\" y2=\"" << f2(py) << "\" stroke=\"" << v.color
               << "\" stroke-width=\"1\" stroke-dasharray=\"5,4\"/>\n";
        }

        for (const auto& s : series_) {
            if (s.points) {
                for (size_t i = 0; i < s.x.size(); ++i)
                    os << "<circle cx=\"" << f2(X(s.x[i])) << "\" cy=\"" << f2(Y(s.y[i]))
                       << "\" r=\"" << f2(s.weight) << "\" fill=\"" << s.color << "\"/>\n";
            } else if (!s.x.empty()) {
                os << "<polyline fill=\"none\" stroke=\"" << s.color
                   << "\" stroke-width=\"" << f2(s.weight) << "\" points=\"";
                for (size_t i = 0; i < s.x.size(); ++i) {
                    if (i) os << ' ';
                    os << f2(X(s.x[i])) << ',' << f2(Y(s.y[i]));
                }
                os << "\"/>\n";
            }
        }

        if (!title_.empty())
            os << "<text x=\"" << f2(L + pw / 2) << "\" y=\"20\" font-family=\"monospace\" "
                  "font-size=\"13\" text-anchor=\"middle\">" << escape(title_)
               << "</text>\n";
        if (!xlabel_.empty())
            os << "<text x=\"" << f2(L + pw / 2) << "\" y=\"" << f2(height_ - 10)
               << "\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\">"
               << escape(xlabel_) << "</text>\n";
        if (!ylabel_.empty())
            os << "<text x=\"14\" y=\"" << f2(T + ph / 2)
               << "\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\" "
                  "transform=\"rotate(-90 14 " << f2(T + ph / 2) << ")\">"
               << escape(ylabel_) << "</text>\n";
        os << "</svg>\n";
    }

private:
    struct Series {
        std::vector<double> x, y;
        std::string color;
        double weight;
        bool points;
    };
    struct Rule {
        double at;
        std::string color;
    };

    double tx(double x) const { return logx_ ? std::log10(x) : x; }

    static std::string f2(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", v);
        return buf;
    }

    static std::string g6(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", v);
        return buf;
    }

    static std::string escape(const std::string& s) {
        std::string out;
        for (char ch : s) {
            if (ch == '&') out += "&amp;";
            else if (ch == '<') out += "&lt;";
            else if (ch == '>') out += "&gt;";
            else out += ch;
        }
        return out;
    }

    static std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
        const double raw = (hi - lo) / target;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        const double norm = raw / mag;
        const double step = mag * (norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0);
        std::vector<double> out;
        for (double t = std::ceil(lo / step) * step; t <= hi + 1e-12 * step; t += step)
            out.push_back(t == 0.0 ? 0.0 : t);
        return out;
    }

    // Inputs are already log10-transformed; ticks at whole decades when the
    // span allows, otherwise fall back to nice fractional powers.
    static std::vector<double> log_ticks(double lo, double hi) {
        std::vector<double> out;
        for (double k = std::ceil(lo); k <= std::floor(hi) + 1e-12; k += 1.0)
            out.push_back(k);
        if (out.size() >= 2) return out;
        return nice_ticks(lo, hi);
    }

    int width_, height_;
    std::string title_, xlabel_, ylabel_;
    bool logx_ = false;
    std::vector<Series> series_;
    std::vector<Rule> vlines_, hlines_;
};

}  // namespace radphi

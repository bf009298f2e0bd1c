#pragma once

#include <radphi/util.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

namespace radphi {

// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slope
// limiting).  Data that is monotone stays monotone after interpolation,
// which is what the model tables rely on.  Also carries exact piecewise
// integrals of the cubic, so antiderivatives of tabulated functions need no
// quadrature.
class MonotoneCubic {
public:
    MonotoneCubic() = default;

    MonotoneCubic(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const size_t n = x_.size();
        if (n < 2 || y_.size() != n)
            throw std::invalid_argument("MonotoneCubic: need matching arrays, length >= 2");
        for (size_t i = 0; i + 1 < n; ++i)
            if (!(x_[i] < x_[i + 1]))
                throw std::invalid_argument("MonotoneCubic: x must be strictly increasing");
        d_.resize(n);
        std::vector<double> h(n - 1), delta(n - 1);
        for (size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            delta[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        if (n == 2) {
            d_[0] = d_[1] = delta[0];
        } else {
            for (size_t i = 1; i + 1 < n; ++i) {
                if (delta[i - 1] * delta[i] <= 0.0) {
                    d_[i] = 0.0;
                } else {
                    const double w1 = 2.0 * h[i] + h[i - 1];
                    const double w2 = h[i] + 2.0 * h[i - 1];
                    d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
                }
            }
            d_[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
            d_[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        // Prefix integrals of the cubic over each cell, exact:
        // int = h*(y_i + y_{i+1})/2 + h^2*(d_i - d_{i+1})/12.
        prefix_.assign(n, 0.0);
        for (size_t i = 0; i + 1 < n; ++i)
            prefix_[i + 1] = prefix_[i] + 0.5 * h[i] * (y_[i] + y_[i + 1]) +
                             h[i] * h[i] * (d_[i] - d_[i + 1]) / 12.0;
    }

    bool empty() const { return x_.empty(); }
    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }
    const std::vector<double>& knots() const { return x_; }
    const std::vector<double>& values() const { return y_; }

    // Value at t, clamped evaluation is NOT done here: t outside the knot
    // range extrapolates linearly with the edge slope.
    double operator()(double t) const {
        if (t <= x_.front()) return y_.front() + d_.front() * (t - x_.front());
        if (t >= x_.back()) return y_.back() + d_.back() * (t - x_.back());
        const size_t i = cell(t);
        const double h = x_[i + 1] - x_[i];
        const double s = (t - x_[i]) / h;
        const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        const double h10 = s * (1.0 - s) * (1.0 - s);
        const double h01 = s * s * (3.0 - 2.0 * s);
        const double h11 = s * s * (s - 1.0);
        return h00 * y_[i] + h * h10 * d_[i] + h01 * y_[i + 1] + h * h11 * d_[i + 1];
    }

    double derivative(double t) const {
        if (t <= x_.front()) return d_.front();
        if (t >= x_.back()) return d_.back();
        const size_t i = cell(t);
        const double h = x_[i + 1] - x_[i];
        const double s = (t - x_[i]) / h;
        return (6.0 * s * s - 6.0 * s) * (y_[i] - y_[i + 1]) / h +
               (3.0 * s * s - 4.0 * s + 1.0) * d_[i] +
               (3.0 * s * s - 2.0 * s) * d_[i + 1];
    }

    // Integral from x_min() to t (t within or beyond the knot range; beyond,
    // the linear extrapolant is integrated exactly).
    double integral_from_min(double t) const {
        if (t <= x_.front()) {
            const double dt = t - x_.front();
            return y_.front() * dt + 0.5 * d_.front() * dt * dt;
        }
        if (t >= x_.back()) {
            const double dt = t - x_.back();
            return prefix_.back() + y_.back() * dt + 0.5 * d_.back() * dt * dt;
        }
        const size_t i = cell(t);
        const double h = x_[i + 1] - x_[i];
        const double s = (t - x_[i]) / h;
        // Antiderivatives of the Hermite basis in s, times h.
        const double s2 = s * s, s3 = s2 * s, s4 = s2 * s2;
        const double H00 = s - s3 + 0.5 * s4;
        const double H10 = 0.5 * s2 - (2.0 / 3.0) * s3 + 0.25 * s4;
        const double H01 = s3 - 0.5 * s4;
        const double H11 = 0.25 * s4 - s3 / 3.0;
        return prefix_[i] + h * (H00 * y_[i] + h * H10 * d_[i] + H01 * y_[i + 1] +
                                 h * H11 * d_[i + 1]);
    }

    double edge_slope_left() const { return d_.front(); }
    double edge_slope_right() const { return d_.back(); }

private:
    static double edge_slope(double h0, double h1, double del0, double del1) {
        double d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
        if (d * del0 <= 0.0) return 0.0;
        if (del0 * del1 < 0.0 && std::abs(d) > 3.0 * std::abs(del0))
            return 3.0 * del0;
        return d;
    }

    size_t cell(double t) const {
        const auto it = std::upper_bound(x_.begin(), x_.end(), t);
        size_t i = static_cast<size_t>(it - x_.begin());
        if (i == 0) return 0;
        if (i >= x_.size()) return x_.size() - 2;
        return i - 1;
    }

    std::vector<double> x_, y_, d_, prefix_;
};

}  // namespace radphi

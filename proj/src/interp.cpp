#include "pinchflow/interp.hpp"

#include <algorithm>
#include <cmath>

#include "pinchflow/errors.hpp"

namespace pinchflow {

MonotoneCubic::MonotoneCubic(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n)
        throw DomainError("MonotoneCubic: need matching arrays of length >= 2");
    x_.assign(x.begin(), x.end());
    y_.assign(y.begin(), y.end());
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1]))
            throw DomainError("MonotoneCubic: abscissae must be strictly increasing");

    // Fritsch-Carlson tangents: start from three-point estimates, then limit
    // so each cubic piece stays monotone between its data values.
    std::vector<double> d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
        d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);

    slope_.assign(n, 0.0);
    slope_[0] = d[0];
    slope_[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (d[i - 1] * d[i] <= 0.0) {
            slope_[i] = 0.0;
        } else {
            const double w1 = 2.0 * (x_[i + 1] - x_[i]) + (x_[i] - x_[i - 1]);
            const double w2 = (x_[i + 1] - x_[i]) + 2.0 * (x_[i] - x_[i - 1]);
            slope_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (d[i] == 0.0) {
            slope_[i] = 0.0;
            slope_[i + 1] = 0.0;
            continue;
        }
        const double a = slope_[i] / d[i];
        const double b = slope_[i + 1] / d[i];
        const double s = a * a + b * b;
        if (s > 9.0) {
            const double t = 3.0 / std::sqrt(s);
            slope_[i] = t * a * d[i];
            slope_[i + 1] = t * b * d[i];
        }
    }
}

double MonotoneCubic::operator()(double xq) const {
    const double lo = x_.front(), hi = x_.back();
    const double slack = 1e-12 * std::max(1.0, std::max(std::fabs(lo), std::fabs(hi)));
    if (xq < lo - slack || xq > hi + slack)
        throw DomainError("MonotoneCubic: query outside data range");
    xq = std::clamp(xq, lo, hi);

    auto it = std::upper_bound(x_.begin(), x_.end(), xq);
    std::size_t i = (it == x_.begin()) ? 0 : static_cast<std::size_t>(it - x_.begin() - 1);
    if (i + 1 >= x_.size()) i = x_.size() - 2;

    const double h = x_[i + 1] - x_[i];
    const double t = (xq - x_[i]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return h00 * y_[i] + h10 * h * slope_[i] + h01 * y_[i + 1] + h11 * h * slope_[i + 1];
}

std::vector<double> interp_onto(std::span<const double> x, std::span<const double> y,
                                std::span<const double> xq) {
    MonotoneCubic f(x, y);
    std::vector<double> out(xq.size());
    for (std::size_t i = 0; i < xq.size(); ++i) out[i] = f(xq[i]);
    return out;
}

} // namespace pinchflow

#pragma once

#include <span>
#include <vector>

namespace pinchflow {

/// Monotone cubic interpolation (Fritsch-Carlson limited tangents). Preserves
/// positivity and monotone segments of the data, which plain cubic splines do
/// not; used wherever profiles are moved between grids.
class MonotoneCubic {
  public:
    /// x strictly increasing, same length as y, length >= 2.
    MonotoneCubic(std::span<const double> x, std::span<const double> y);

    /// Evaluate at xq; throws DomainError outside [x.front(), x.back()]
    /// (beyond a tiny rounding slack at the ends).
    double operator()(double xq) const;

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

  private:
    std::vector<double> x_, y_, slope_;
};

/// Interpolate a sampled function onto new abscissae (all inside range).
std::vector<double> interp_onto(std::span<const double> x, std::span<const double> y,
                                std::span<const double> xq);

} // namespace pinchflow

#pragma once

#include <functional>
#include <span>

#include "pinchflow/geometry.hpp"

namespace pinchflow {

/// Map an unscaled profile u(r, t) into the rescaled frame about the blow-up
/// time t_star:
///   rho = r / sqrt(t_star - t),  v = u / sqrt(t_star - t),
///   tau = -log(t_star - t).
/// Requires t < t_star. Pointwise-exact (no resampling).
GridProfile to_rescaled(const GridProfile& p, double t_star);

/// Exact inverse of to_rescaled.
GridProfile from_rescaled(const GridProfile& p, double t_star);

/// Map an unscaled profile (times relative to the blow-up time, i.e. the
/// blow-up is at t = 0) into the secondary zoom frame of a matching point:
///   z = r / L,  h = u / L,  s = (t - t1) / L^2,  L = sqrt(tau1^(1/10) (-t1)).
/// Requires p.timestamp >= t1.
GridProfile to_secondary(const GridProfile& p, const MatchingPoint& mp);

/// Exact inverse of to_secondary.
GridProfile from_secondary(const GridProfile& p, const MatchingPoint& mp);

/// The change-of-frame identity expressing h directly through the rescaled
/// profile:
///   h(z, s) = sqrt(1 - tau1^(1/10) s) / tau1^(1/20)
///             * v( tau1^(1/20) z / sqrt(1 - tau1^(1/10) s),
///                  tau1 - log(1 - tau1^(1/10) s) ).
/// v_eval(rho, tau) supplies the rescaled profile. Valid for
/// 0 <= s < tau1^(-1/10); the frame blows up at s = tau1^(-1/10).
/// Negative s down to -1 is also accepted (the pre-anchor window).
double secondary_h_identity(double z, double s, const MatchingPoint& mp,
                            const std::function<double(double, double)>& v_eval);

/// Radius of the analysis window at rescaled time tau:
///   multiplier * sqrt(100 ln tau + 9 (tau - xi0)^(11/10)).
/// Requires tau > 1 and tau >= xi0.
double omega_radius(double tau, const WindowSpec& w);

/// Japanese bracket <y> = sqrt(1 + y^2).
inline double japanese_bracket(double y) { return std::sqrt(1.0 + y * y); }

/// Resample a profile onto new radii by monotone cubic interpolation.
/// new_radii must start at 0 and stay inside the source range.
GridProfile resample(const GridProfile& p, std::span<const double> new_radii);

} // namespace pinchflow

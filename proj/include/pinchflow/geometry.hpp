#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "pinchflow/errors.hpp"

namespace pinchflow {

/// Geometry of a rotationally symmetric hypersurface written as a radial
/// graph: an axis R^m and a fiber sphere S^k of radius u. The shrinking
/// cylinder solution has radius sqrt(2k); the model case is m = 3, k = 1
/// (fiber S^1 of radius sqrt(2)).
struct FlowGeometry {
    int axis_dim = 3;  // m
    int fiber_dim = 1; // k

    double cylinder_radius() const { return std::sqrt(2.0 * fiber_dim); }

    void validate() const {
        if (axis_dim < 1) throw DomainError("FlowGeometry: axis_dim must be >= 1");
        if (fiber_dim < 1) throw DomainError("FlowGeometry: fiber_dim must be >= 1");
    }
};

/// Coordinate frame a profile lives in.
///   unscaled:  radius u(r) at physical time t
///   rescaled:  v(rho) at tau = -log(T* - t), rho = r/sqrt(T* - t)
///   secondary: h(z) at time s, the zoomed frame anchored at a matching point
enum class Frame { unscaled, rescaled, secondary };

const char* frame_name(Frame f);
Frame frame_from_name(const std::string& name);

/// One time slice of the flow as a radial graph.
struct GridProfile {
    std::vector<double> radii;  // strictly increasing, radii[0] == 0
    std::vector<double> values; // positive, same length
    Frame frame = Frame::unscaled;
    double timestamp = 0.0; // t, tau, or s depending on frame

    std::size_t size() const { return radii.size(); }

    /// Throws DomainError on any violated invariant (shape, monotonicity,
    /// positivity, finiteness).
    void validate() const;

    /// Discrete one-sided derivative at the axis; symmetry demands ~0.
    double axis_slope() const;
};

/// The matching triple: a radius |x1|, the rescaled time tau1 at which that
/// radius sits at the edge window rho = tau1^(11/20), and the corresponding
/// unscaled time t1 = -exp(-tau1) (times relative to the blow-up time).
struct MatchingPoint {
    double x1_norm = 0.0; // in (0, 1)
    double tau1 = 0.0;    // > 1
    double t1 = 0.0;      // = -exp(-tau1)

    void validate() const;
};

/// Parameters of the expanding analysis window
///   Omega(tau) = multiplier * sqrt(100 ln tau + 9 (tau - xi0)^(11/10)).
struct WindowSpec {
    double xi0 = 0.0;       // >= 0
    double multiplier = 1.0; // > 0, scales Omega for sub-windows

    void validate() const {
        if (!(xi0 >= 0.0)) throw DomainError("WindowSpec: xi0 must be >= 0");
        if (!(multiplier > 0.0)) throw DomainError("WindowSpec: multiplier must be > 0");
    }
};

} // namespace pinchflow

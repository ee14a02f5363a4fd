#include "pinchflow/geometry.hpp"

#include <cmath>

namespace pinchflow {

const char* frame_name(Frame f) {
    switch (f) {
    case Frame::unscaled: return "unscaled";
    case Frame::rescaled: return "rescaled";
    case Frame::secondary: return "secondary";
    }
    return "?";
}

Frame frame_from_name(const std::string& name) {
    if (name == "unscaled") return Frame::unscaled;
    if (name == "rescaled") return Frame::rescaled;
    if (name == "secondary") return Frame::secondary;
    throw DomainError("unknown frame name: " + name);
}

void GridProfile::validate() const {
    if (radii.size() != values.size())
        throw DomainError("GridProfile: radii/values length mismatch");
    if (radii.size() < 3)
        throw DomainError("GridProfile: need at least 3 grid points");
    if (radii.front() != 0.0)
        throw DomainError("GridProfile: radii must start at 0");
    if (!std::isfinite(timestamp))
        throw DomainError("GridProfile: non-finite timestamp");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!std::isfinite(radii[i]) || !std::isfinite(values[i]))
            throw DomainError("GridProfile: non-finite entry");
        if (i > 0 && !(radii[i] > radii[i - 1]))
            throw DomainError("GridProfile: radii must be strictly increasing");
        if (!(values[i] > 0.0))
            throw DomainError("GridProfile: values must be positive");
    }
}

double GridProfile::axis_slope() const {
    if (radii.size() < 2) return 0.0;
    return (values[1] - values[0]) / (radii[1] - radii[0]);
}

void MatchingPoint::validate() const {
    if (!(x1_norm > 0.0 && x1_norm < 1.0))
        throw DomainError("MatchingPoint: x1_norm must be in (0,1)");
    if (!(tau1 > 1.0)) throw DomainError("MatchingPoint: tau1 must be > 1");
    if (!(t1 < 0.0)) throw DomainError("MatchingPoint: t1 must be negative");
}

} // namespace pinchflow

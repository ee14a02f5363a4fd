#include "pinchflow/frames.hpp"

#include <cmath>

#include "pinchflow/interp.hpp"

namespace pinchflow {

namespace {

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw DomainError(std::string("non-finite ") + what);
}

GridProfile scaled_copy(const GridProfile& p, double factor, Frame frame, double timestamp) {
    GridProfile q;
    q.radii.resize(p.radii.size());
    q.values.resize(p.values.size());
    for (std::size_t i = 0; i < p.radii.size(); ++i) {
        q.radii[i] = p.radii[i] * factor;
        q.values[i] = p.values[i] * factor;
    }
    q.frame = frame;
    q.timestamp = timestamp;
    return q;
}

} // namespace

GridProfile to_rescaled(const GridProfile& p, double t_star) {
    require_finite(t_star, "t_star");
    p.validate();
    if (p.frame != Frame::unscaled)
        throw DomainError("to_rescaled: input must be an unscaled profile");
    const double remaining = t_star - p.timestamp;
    if (!(remaining > 0.0))
        throw DomainError("to_rescaled: timestamp must precede t_star");
    const double root = std::sqrt(remaining);
    return scaled_copy(p, 1.0 / root, Frame::rescaled, -std::log(remaining));
}

GridProfile from_rescaled(const GridProfile& p, double t_star) {
    require_finite(t_star, "t_star");
    p.validate();
    if (p.frame != Frame::rescaled)
        throw DomainError("from_rescaled: input must be a rescaled profile");
    const double remaining = std::exp(-p.timestamp);
    return scaled_copy(p, std::sqrt(remaining), Frame::unscaled, t_star - remaining);
}

GridProfile to_secondary(const GridProfile& p, const MatchingPoint& mp) {
    p.validate();
    mp.validate();
    if (p.frame != Frame::unscaled)
        throw DomainError("to_secondary: input must be an unscaled profile");
    if (p.timestamp < mp.t1)
        throw DomainError("to_secondary: timestamp must be >= t1");
    const double len2 = std::pow(mp.tau1, 0.1) * (-mp.t1);
    const double len = std::sqrt(len2);
    const double s = (p.timestamp - mp.t1) / len2;
    return scaled_copy(p, 1.0 / len, Frame::secondary, s);
}

GridProfile from_secondary(const GridProfile& p, const MatchingPoint& mp) {
    p.validate();
    mp.validate();
    if (p.frame != Frame::secondary)
        throw DomainError("from_secondary: input must be a secondary profile");
    const double len2 = std::pow(mp.tau1, 0.1) * (-mp.t1);
    const double len = std::sqrt(len2);
    return scaled_copy(p, len, Frame::unscaled, mp.t1 + p.timestamp * len2);
}

double secondary_h_identity(double z, double s, const MatchingPoint& mp,
                            const std::function<double(double, double)>& v_eval) {
    mp.validate();
    require_finite(z, "z");
    require_finite(s, "s");
    const double tau1_p = std::pow(mp.tau1, 0.1);
    if (s >= 1.0 / tau1_p)
        throw DomainError("secondary_h_identity: frame blows up at s = tau1^(-1/10)");
    if (s < -1.0)
        throw DomainError("secondary_h_identity: s below the covered window [-1, tau1^(-1/10))");
    const double shrink = 1.0 - tau1_p * s;
    const double root = std::sqrt(shrink);
    const double tau1_20 = std::pow(mp.tau1, 0.05);
    const double rho = tau1_20 * z / root;
    const double tau = mp.tau1 - std::log(shrink);
    return root / tau1_20 * v_eval(rho, tau);
}

double omega_radius(double tau, const WindowSpec& w) {
    w.validate();
    require_finite(tau, "tau");
    if (!(tau > 1.0) || tau < w.xi0)
        throw DomainError("omega_radius: requires tau > 1 and tau >= xi0");
    const double arg = 100.0 * std::log(tau) + 9.0 * std::pow(tau - w.xi0, 1.1);
    return w.multiplier * std::sqrt(arg);
}

GridProfile resample(const GridProfile& p, std::span<const double> new_radii) {
    p.validate();
    MonotoneCubic f(p.radii, p.values);
    GridProfile q;
    q.radii.assign(new_radii.begin(), new_radii.end());
    q.values.resize(new_radii.size());
    for (std::size_t i = 0; i < new_radii.size(); ++i) q.values[i] = f(new_radii[i]);
    q.frame = p.frame;
    q.timestamp = p.timestamp;
    q.validate();
    return q;
}

} // namespace pinchflow

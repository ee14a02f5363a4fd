#pragma once

#include <map>
#include <string>
#include <vector>

#include "pinchflow/geometry.hpp"

namespace pinchflow {

/// Least-squares fit of a rescaled profile to the cylinder-with-quadratic
/// ansatz v = sqrt((2 + b rho^2) / (2a)) over the window rho <= Omega(tau).
/// The fit runs in squared variables, where the model is linear in
/// (1/(2a), b/(2a)), weighted by <rho>^-3/(2v) (the remainder's own sup-norm
/// weight), so it is closed-form, exact on the ansatz, and insensitive to
/// the outer wing where the remainder bound carries no information.
struct ProfileFit {
    double tau = 0.0;
    double a = 0.0; // scale parameter, 1/2 at the cylinder
    double b = 0.0; // scalar quadratic coefficient (B = b*I in this class)
    double window = 0.0;      // Omega value used
    double residual_l2 = 0.0; // weighted rms of v^2 - model over the window
    bool degenerate_b = false; // b unidentifiable (near-constant profile)
    std::vector<double> radii; // grid of the fitted profile
    std::vector<double> eta;   // remainder v - ansatz; 0 outside the window
    std::size_t window_count = 0; // grid points inside the window
    std::map<std::string, double> norms; // weighted remainder norms
};

ProfileFit fit_profile(const GridProfile& v, const WindowSpec& w);

/// Weighted sup-norms of the remainder over the window:
///   w3_eta:  max |eta| / <rho>^3
///   w2_grad: max |eta'| / <rho>^2
///   w1_hess: max |eta''| / <rho>
/// Radial derivatives are centered second-order differences with one-sided
/// closure at the window edges. Angular-derivative variants vanish
/// identically in the symmetric class and are reported as 0.
/// sub_multiplier < 1 shrinks the indicator to rho <= sub_multiplier * Omega
/// while keeping the same derivative field, so sup-norms are monotone in it.
std::map<std::string, double> remainder_norms(const ProfileFit& fit,
                                              double sub_multiplier = 1.0);

/// Deviation statistics of v from sqrt(2 + rho^2/tau) over the window
/// |y| <= 2 tau^(11/20).
struct MainProfileStats {
    double sup_dev = 0.0;
    double mean_dev = 0.0;
    double window_radius = 0.0;     // 2 tau^(11/20)
    double achieved_fraction = 1.0; // < 1 when the grid truncates the window
    bool truncated = false;
    std::size_t count = 0;
};

MainProfileStats check_main_profile(const GridProfile& v);

} // namespace pinchflow

#include "pinchflow/profile_fit.hpp"

#include <cmath>

#include "pinchflow/errors.hpp"
#include "pinchflow/frames.hpp"
#include "pinchflow/kernels/kernels.hpp"

namespace pinchflow {

namespace {

// Derivative weights of the quadratic through (xa,xb,xc), evaluated at q.
void d1_weights(double xa, double xb, double xc, double q, double* w) {
    w[0] = (2.0 * q - xb - xc) / ((xa - xb) * (xa - xc));
    w[1] = (2.0 * q - xa - xc) / ((xb - xa) * (xb - xc));
    w[2] = (2.0 * q - xa - xb) / ((xc - xa) * (xc - xb));
}

void d2_weights(double xa, double xb, double xc, double* w) {
    w[0] = 2.0 / ((xa - xb) * (xa - xc));
    w[1] = 2.0 / ((xb - xa) * (xb - xc));
    w[2] = 2.0 / ((xc - xa) * (xc - xb));
}

} // namespace

ProfileFit fit_profile(const GridProfile& v, const WindowSpec& w) {
    v.validate();
    if (v.frame != Frame::rescaled)
        throw DomainError("fit_profile: expects a rescaled profile");
    ProfileFit fit;
    fit.tau = v.timestamp;
    fit.window = omega_radius(v.timestamp, w);
    fit.radii = v.radii;
    fit.eta.assign(v.size(), 0.0);

    std::size_t nw = 0;
    while (nw < v.size() && v.radii[nw] <= fit.window) ++nw;
    if (nw < 20) throw DomainError("fit_profile: window holds fewer than 20 grid points");
    fit.window_count = nw;

    // Weighted normal equations for v^2 = 2P + Q rho^2, centered in the
    // rho^2 regressor for conditioning. The weight <rho>^-3 / (2v) turns the
    // squared-variable residual into the remainder eta measured in its own
    // sup-norm weight; the unweighted fit would be dominated by the outer
    // wing, where the remainder bound is vacuous.
    double sw = 0.0, mu_x = 0.0, mu_y = 0.0;
    std::vector<double> w2(nw);
    for (std::size_t i = 0; i < nw; ++i) {
        const double jb = japanese_bracket(v.radii[i]);
        const double w = 1.0 / (jb * jb * jb * 2.0 * v.values[i]);
        w2[i] = w * w;
        sw += w2[i];
        mu_x += w2[i] * v.radii[i] * v.radii[i];
        mu_y += w2[i] * v.values[i] * v.values[i];
    }
    mu_x /= sw;
    mu_y /= sw;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < nw; ++i) {
        const double dx = v.radii[i] * v.radii[i] - mu_x;
        sxx += w2[i] * dx * dx;
        sxy += w2[i] * dx * (v.values[i] * v.values[i] - mu_y);
    }

    double P, Q;
    if (sxx <= 0.0) {
        Q = 0.0;
        P = 0.5 * mu_y;
        fit.degenerate_b = true;
    } else {
        Q = sxy / sxx;
        P = 0.5 * (mu_y - Q * mu_x);
        // Quadratic part below measurement scale: report b = 0, flagged.
        if (std::fabs(Q) * (mu_x + fit.window * fit.window) < 1e-10 * mu_y) {
            Q = 0.0;
            P = 0.5 * mu_y;
            fit.degenerate_b = true;
        }
    }
    if (!(P > 0.0)) throw DomainError("fit_profile: nonpositive scale parameter");
    fit.a = 1.0 / (2.0 * P);
    fit.b = Q / P;

    double ss = 0.0;
    for (std::size_t i = 0; i < nw; ++i) {
        const double model2 = (2.0 + fit.b * v.radii[i] * v.radii[i]) / (2.0 * fit.a);
        const double e2 = v.values[i] * v.values[i] - model2;
        ss += w2[i] * e2 * e2;
        fit.eta[i] = v.values[i] - std::sqrt(model2);
    }
    fit.residual_l2 = std::sqrt(ss / sw);
    fit.norms = remainder_norms(fit);
    return fit;
}

std::map<std::string, double> remainder_norms(const ProfileFit& fit,
                                              double sub_multiplier) {
    const std::size_t nw = fit.window_count;
    if (nw == 0 || fit.eta.size() < nw)
        throw DomainError("remainder_norms: fit has no window data");
    if (!(sub_multiplier > 0.0 && sub_multiplier <= 1.0))
        throw DomainError("remainder_norms: sub_multiplier must be in (0,1]");
    const auto& r = fit.radii;
    const auto& e = fit.eta;

    std::vector<double> d1(nw, 0.0), d2(nw, 0.0);
    if (nw >= 3) {
        double w[3];
        for (std::size_t i = 0; i < nw; ++i) {
            // one-sided closure at both window edges
            const std::size_t c = (i == 0) ? 1 : (i == nw - 1 ? nw - 2 : i);
            d1_weights(r[c - 1], r[c], r[c + 1], r[i], w);
            d1[i] = w[0] * e[c - 1] + w[1] * e[c] + w[2] * e[c + 1];
            d2_weights(r[c - 1], r[c], r[c + 1], w);
            d2[i] = w[0] * e[c - 1] + w[1] * e[c] + w[2] * e[c + 1];
        }
    }

    std::size_t nm = nw; // masked extent: rho <= sub_multiplier * Omega
    if (sub_multiplier < 1.0) {
        const double lim = sub_multiplier * fit.window;
        nm = 0;
        while (nm < nw && r[nm] <= lim) ++nm;
        if (nm == 0) throw DomainError("remainder_norms: empty sub-window");
    }

    std::vector<double> w3(nm), w2(nm), w1(nm);
    for (std::size_t i = 0; i < nm; ++i) {
        const double jb = japanese_bracket(r[i]);
        w3[i] = 1.0 / (jb * jb * jb);
        w2[i] = 1.0 / (jb * jb);
        w1[i] = 1.0 / jb;
    }

    const auto& kt = kern::kernels();
    std::map<std::string, double> norms;
    norms["w3_eta"] = kt.weighted_max_abs(w3.data(), e.data(), nm);
    norms["w2_grad"] = kt.weighted_max_abs(w2.data(), d1.data(), nm);
    norms["w1_hess"] = kt.weighted_max_abs(w1.data(), d2.data(), nm);
    // theta derivatives vanish identically in the symmetric class
    norms["w3_eta_dtheta"] = 0.0;
    norms["w3_eta_dtheta2"] = 0.0;
    norms["w2_grad_dtheta"] = 0.0;
    return norms;
}

MainProfileStats check_main_profile(const GridProfile& v) {
    v.validate();
    if (v.frame != Frame::rescaled)
        throw DomainError("check_main_profile: expects a rescaled profile");
    const double tau = v.timestamp;
    if (!(tau > 1.0)) throw DomainError("check_main_profile: requires tau > 1");

    MainProfileStats st;
    st.window_radius = 2.0 * std::pow(tau, 0.55);
    const double extent = v.radii.back();
    if (extent < st.window_radius) {
        st.truncated = true;
        st.achieved_fraction = extent / st.window_radius;
    }
    const double lim = std::min(st.window_radius, extent);
    double sup = 0.0, sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < v.size() && v.radii[i] <= lim; ++i) {
        const double model = std::sqrt(2.0 + v.radii[i] * v.radii[i] / tau);
        const double dev = std::fabs(v.values[i] / model - 1.0);
        sup = std::max(sup, dev);
        sum += dev;
        ++count;
    }
    if (count == 0) throw DomainError("check_main_profile: empty window");
    st.sup_dev = sup;
    st.mean_dev = sum / static_cast<double>(count);
    st.count = count;
    return st;
}

} // namespace pinchflow

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pinchflow/frames.hpp"
#include "pinchflow/grid.hpp"
#include "pinchflow/profile_fit.hpp"

using namespace pinchflow;

namespace {

GridProfile ansatz_profile(double tau, double a, double b, double r_max, int n) {
    GridProfile v;
    v.frame = Frame::rescaled;
    v.timestamp = tau;
    v.radii = make_uniform_grid(r_max, n);
    v.values.resize(v.radii.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v.values[i] = std::sqrt((2.0 + b * v.radii[i] * v.radii[i]) / (2.0 * a));
    return v;
}

} // namespace

TEST_CASE("fit_profile: exact ansatz recovery") {
    const double tau = 20.0;
    WindowSpec w;
    const auto v = ansatz_profile(tau, 0.5, 1.0 / tau, 30.0, 1500);
    const auto fit = fit_profile(v, w);
    CHECK(fit.a == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(fit.b == doctest::Approx(1.0 / tau).epsilon(1e-10));
    CHECK(fit.residual_l2 <= 1e-12);
    CHECK_FALSE(fit.degenerate_b);
    CHECK(fit.window_count >= 20);
    for (std::size_t i = 0; i < fit.window_count; ++i)
        CHECK(std::fabs(fit.eta[i]) <= 1e-12);
}

TEST_CASE("fit_profile: constant cylinder gives a=1/2, b=0, degenerate flag") {
    GridProfile v;
    v.frame = Frame::rescaled;
    v.timestamp = 20.0;
    v.radii = make_uniform_grid(30.0, 600);
    v.values.assign(v.radii.size(), std::sqrt(2.0));
    const auto fit = fit_profile(v, WindowSpec{});
    CHECK(fit.a == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(fit.b == 0.0);
    CHECK(fit.degenerate_b);
}

TEST_CASE("fit_profile: scale consistency (c*v recovers a/c^2, b)") {
    const double tau = 16.0;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> dc(0.5, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        const double a0 = 0.45 + 0.01 * trial;
        const double b0 = 1.0 / tau * (0.8 + 0.05 * trial);
        const double c = dc(rng);
        auto v = ansatz_profile(tau, a0, b0, 25.0, 900);
        for (auto& x : v.values) x *= c;
        const auto fit = fit_profile(v, WindowSpec{});
        CHECK(fit.a == doctest::Approx(a0 / (c * c)).epsilon(1e-9));
        CHECK(fit.b == doctest::Approx(b0).epsilon(1e-9));
    }
}

TEST_CASE("fit_profile: window must hold at least 20 points") {
    auto v = ansatz_profile(20.0, 0.5, 0.05, 30.0, 1000);
    WindowSpec w;
    w.multiplier = 1e-4;
    CHECK_THROWS_AS(fit_profile(v, w), DomainError);
}

TEST_CASE("remainder_norms: zero remainder, weight cancellation, theta zeros") {
    const auto v = ansatz_profile(20.0, 0.5, 0.05, 30.0, 1200);
    auto fit = fit_profile(v, WindowSpec{});
    auto norms = remainder_norms(fit);
    CHECK(norms.at("w3_eta") <= 1e-12);
    CHECK(norms.at("w2_grad") <= 1e-10);
    CHECK(norms.at("w1_hess") <= 1e-8);
    CHECK(norms.at("w3_eta_dtheta") == 0.0);
    CHECK(norms.at("w2_grad_dtheta") == 0.0);

    // eta = c <rho>^3 cancels the weight exactly
    const double c = 0.37;
    for (std::size_t i = 0; i < fit.window_count; ++i)
        fit.eta[i] = c * std::pow(japanese_bracket(fit.radii[i]), 3.0);
    norms = remainder_norms(fit);
    CHECK(norms.at("w3_eta") == doctest::Approx(c).epsilon(1e-12));
}

TEST_CASE("remainder_norms: monotone under window shrinkage") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> noise(0.0, 1e-3);
    auto v = ansatz_profile(18.0, 0.5, 1.0 / 18.0, 28.0, 800);
    for (auto& x : v.values) x += noise(rng);
    const auto fit = fit_profile(v, WindowSpec{});
    const auto full = remainder_norms(fit);
    double prev3 = 0.0, prev2 = 0.0, prev1 = 0.0;
    for (double sub : {0.2, 0.4, 0.6, 0.8, 1.0}) {
        const auto n = remainder_norms(fit, sub);
        CHECK(n.at("w3_eta") >= prev3);
        CHECK(n.at("w2_grad") >= prev2);
        CHECK(n.at("w1_hess") >= prev1);
        CHECK(n.at("w3_eta") <= full.at("w3_eta"));
        CHECK(n.at("w2_grad") <= full.at("w2_grad"));
        CHECK(n.at("w1_hess") <= full.at("w1_hess"));
        prev3 = n.at("w3_eta");
        prev2 = n.at("w2_grad");
        prev1 = n.at("w1_hess");
    }
}

TEST_CASE("check_main_profile: exact ansatz has zero deviation") {
    const double tau = 25.0;
    const auto v = ansatz_profile(tau, 0.5, 1.0 / tau, 2.2 * std::pow(tau, 0.55), 2000);
    const auto st = check_main_profile(v);
    CHECK_FALSE(st.truncated);
    CHECK(st.sup_dev <= 1e-13);
    CHECK(st.mean_dev <= 1e-13);
}

TEST_CASE("check_main_profile: truncated window is reported with its fraction") {
    const double tau = 25.0;
    const auto v = ansatz_profile(tau, 0.5, 1.0 / tau, 5.0, 300);
    const auto st = check_main_profile(v);
    CHECK(st.truncated);
    CHECK(st.achieved_fraction ==
          doctest::Approx(5.0 / (2.0 * std::pow(tau, 0.55))).epsilon(1e-12));
}

TEST_CASE("check_main_profile: |eta| <= <y>^3 tau^-2 implies deviation <= tau^-1/10") {
    // the remainder bound forces the simplified profile on |y| <= 2 tau^(11/20)
    const double tau = 150.0;
    const double r_max = 2.0 * std::pow(tau, 0.55) * 1.02;
    GridProfile v;
    v.frame = Frame::rescaled;
    v.timestamp = tau;
    v.radii = make_uniform_grid(r_max, 4000);
    v.values.resize(v.radii.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double rho = v.radii[i];
        const double model = std::sqrt(2.0 + rho * rho / tau);
        const double eta = std::pow(japanese_bracket(rho), 3.0) / (tau * tau);
        v.values[i] = model + eta; // worst-case signed remainder
    }
    const auto st = check_main_profile(v);
    CHECK(st.sup_dev <= std::pow(tau, -0.1));
}

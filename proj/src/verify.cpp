#include "pinchflow/verify.hpp"

#include <algorithm>
#include <cmath>

#include "pinchflow/errors.hpp"
#include "pinchflow/frames.hpp"

namespace pinchflow {

const char* trend_name(Trend t) {
    switch (t) {
    case Trend::improving: return "improving";
    case Trend::flat: return "flat";
    case Trend::worsening: return "worsening";
    }
    return "?";
}

const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::trend_pass: return "trend-pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

Trend classify_trend(std::span<const double> dev, double* slope_out) {
    if (slope_out) *slope_out = 0.0;
    const std::size_t n = dev.size();
    if (n < 2) return Trend::flat;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += static_cast<double>(i);
        my += dev[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, scale = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = static_cast<double>(i) - mx;
        sxx += dx * dx;
        sxy += dx * (dev[i] - my);
        scale += std::fabs(dev[i]);
    }
    const double slope = sxy / sxx;
    if (slope_out) *slope_out = slope;
    scale = scale / n + 1e-300;
    if (slope < -1e-3 * scale) return Trend::improving;
    if (slope > 1e-3 * scale) return Trend::worsening;
    return Trend::flat;
}

Verdict judge(std::span<const double> dev, double tolerance, bool decreasing) {
    if (dev.empty()) return Verdict::inconclusive;
    bool all_within = true;
    for (double d : dev)
        if (!(d <= tolerance)) all_within = false;
    if (all_within) return Verdict::pass;
    if (decreasing) return Verdict::trend_pass;
    return Verdict::fail;
}

MatchingPoint matching_tau(double x1_norm) {
    if (!(x1_norm > 0.0 && x1_norm < 1.0))
        throw DomainError("matching_tau: x1_norm must be in (0,1)");
    const double lx = std::log(x1_norm);
    auto f = [&](double tau) { return 0.5 * tau + lx - 0.55 * std::log(tau); };

    double lo = 1.1; // minimum of f; the largest root lies to its right
    if (!(f(lo) < 0.0))
        throw DomainError("matching_tau: no root tau1 > 1 (x1_norm too large)");
    double hi = std::max(4.0, -2.0 * lx + 8.0);
    while (f(hi) <= 0.0) hi *= 2.0;

    for (int it = 0; it < 200 && (hi - lo) > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    double tau = 0.5 * (lo + hi);
    for (int it = 0; it < 3; ++it) {
        const double fp = 0.5 - 0.55 / tau;
        tau -= f(tau) / fp;
    }

    MatchingPoint mp;
    mp.x1_norm = x1_norm;
    mp.tau1 = tau;
    mp.t1 = -std::exp(-tau);
    const double rhs = std::pow(tau, 0.55);
    const double resid = std::fabs(std::exp(0.5 * tau) * x1_norm - rhs);
    if (!(resid <= 1e-9 * rhs))
        throw DomainError("matching_tau: residual above 1e-9 (no convergence)");
    mp.validate();
    return mp;
}

// ---------------------------------------------------------------------------

RunSampler::RunSampler(const RunRecord& rec) : rec_(&rec) {
    if (rec.snapshots.empty()) throw DomainError("RunSampler: run has no snapshots");
    if (!std::isfinite(rec.t_star))
        throw DomainError("RunSampler: run has no blow-up time estimate");
    t_star_ = rec.t_star;
    interp_.reserve(rec.snapshots.size());
    scale_.reserve(rec.snapshots.size());
    tau_.reserve(rec.snapshots.size());
    for (std::size_t j = 0; j < rec.snapshots.size(); ++j) {
        const auto& s = rec.snapshots[j];
        const auto& meta = rec.snapshot_meta[j];
        interp_.emplace_back(s.radii, s.values);
        if (s.frame == Frame::rescaled) {
            scale_.push_back(std::sqrt(meta.t_star_used - meta.t_unscaled));
        } else {
            scale_.push_back(1.0);
        }
        const double rem = t_star_ - meta.t_unscaled;
        tau_.push_back(rem > 0.0 ? -std::log(rem) : std::numeric_limits<double>::infinity());
    }
    final_tau_ = tau_.back();
}

std::optional<double> RunSampler::eval_snapshot(std::size_t j, double x) const {
    const auto& s = rec_->snapshots[j];
    const double rho = x / scale_[j];
    if (rho > s.radii.back()) return std::nullopt;
    return scale_[j] * interp_[j](rho);
}

std::optional<double> RunSampler::u_at(double x, double t_sim) const {
    const auto& meta = rec_->snapshot_meta;
    if (meta.empty() || t_sim < meta.front().t_unscaled ||
        t_sim > meta.back().t_unscaled)
        return std::nullopt;
    std::size_t j = 0;
    while (j + 1 < meta.size() && meta[j + 1].t_unscaled < t_sim) ++j;
    const std::size_t j2 = std::min(j + 1, meta.size() - 1);
    const auto a = eval_snapshot(j, x);
    if (j2 == j) return a;
    const auto b = eval_snapshot(j2, x);
    if (!a || !b) return std::nullopt;
    // interpolate linearly in tau = -ln(t_star - t); snapshots are
    // equispaced there and u(x, .) is smooth on that clock
    const double rem = t_star_ - t_sim;
    if (!(rem > 0.0)) return std::nullopt;
    const double tq = -std::log(rem);
    const double t0 = tau_[j], t1 = tau_[j2];
    const double w = (t1 > t0) ? std::clamp((tq - t0) / (t1 - t0), 0.0, 1.0) : 0.0;
    return (1.0 - w) * *a + w * *b;
}

std::optional<double> RunSampler::u_final(double x, double* tau_used) const {
    for (std::size_t j = rec_->snapshots.size(); j-- > 0;) {
        const auto v = eval_snapshot(j, x);
        if (v) {
            if (tau_used) *tau_used = tau_[j];
            return v;
        }
    }
    return std::nullopt;
}

std::optional<double> RunSampler::latest_resolved_time(double x) const {
    for (std::size_t j = rec_->snapshots.size(); j-- > 0;) {
        if (eval_snapshot(j, x)) return rec_->snapshot_meta[j].t_unscaled;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------

VerificationReport verify_log_relation(std::span<const double> x1_points) {
    VerificationReport rep;
    rep.claim = "log_relation";
    if (x1_points.empty()) return rep;
    std::vector<double> xs(x1_points.begin(), x1_points.end());
    std::sort(xs.rbegin(), xs.rend()); // toward the limit x1 -> 0
    for (double x1 : xs) {
        if (!(x1 < 0.01))
            throw DomainError("verify_log_relation: requires x1_norm < 0.01");
        const MatchingPoint mp = matching_tau(x1);
        const double ratio = -std::log(x1) / (0.5 * mp.tau1);
        rep.samples.push_back({x1, ratio, 1.0, std::fabs(ratio - 1.0)});
    }
    std::vector<double> dev;
    bool increasing = true, below_one = true;
    for (std::size_t i = 0; i < rep.samples.size(); ++i) {
        dev.push_back(rep.samples[i].deviation);
        if (rep.samples[i].measured >= 1.0) below_one = false;
        if (i > 0 && !(rep.samples[i].measured > rep.samples[i - 1].measured))
            increasing = false;
    }
    rep.trend = classify_trend(dev, &rep.trend_slope);
    rep.tolerances["ratio_below_one"] = 1.0;
    rep.verdict = (increasing && below_one) ? Verdict::trend_pass : Verdict::fail;
    return rep;
}

VerificationReport verify_u_at_t1(const RunRecord& rec,
                                  std::span<const double> x1_points) {
    VerificationReport rep;
    rep.claim = "u_at_t1";
    if (rec.status != RunStatus::pinched) {
        rep.notes.push_back("run did not pinch");
        return rep;
    }
    if (rec.degenerate_pinch) {
        rep.notes.push_back("degenerate r-independent collapse; matching radii "
                            "carry no profile information");
        return rep;
    }
    const RunSampler sam(rec);
    std::vector<double> xs(x1_points.begin(), x1_points.end());
    std::sort(xs.rbegin(), xs.rend());
    std::vector<double> dev;
    double tol = 0.0;
    for (double x1 : xs) {
        const MatchingPoint mp = matching_tau(x1);
        const double t1_sim = sam.t_star() + mp.t1;
        const auto u = sam.u_at(x1, t1_sim);
        if (!u) {
            rep.notes.push_back("x1 = " + std::to_string(x1) +
                                ": tau1 outside the resolved range");
            continue;
        }
        const double predicted =
            std::exp(-0.5 * mp.tau1) * std::pow(mp.tau1, 0.05);
        const double ratio = *u / predicted;
        rep.samples.push_back({x1, ratio, 1.0, std::fabs(ratio - 1.0)});
        dev.push_back(std::fabs(ratio - 1.0));
        // exact-ansatz offset sqrt(1+2 tau^-.1)-1 <= tau^-.1, plus margin
        tol = std::max(tol, 1.25 * std::pow(mp.tau1, -0.1));
    }
    if (rep.samples.empty()) {
        rep.verdict = Verdict::inconclusive;
        return rep;
    }
    rep.trend = classify_trend(dev, &rep.trend_slope);
    rep.tolerances["ratio_dev"] = tol;
    bool decreasing = dev.size() >= 2 && dev.back() < dev.front() &&
                      rep.trend != Trend::worsening;
    rep.verdict = judge(dev, tol, decreasing);
    if (rep.samples.size() < x1_points.size() && rep.verdict == Verdict::fail)
        rep.verdict = Verdict::inconclusive;
    return rep;
}

VerificationReport verify_final_profile(const RunRecord& rec,
                                        std::span<const double> radii) {
    VerificationReport rep;
    rep.claim = "final_profile";
    if (rec.status != RunStatus::pinched) {
        rep.notes.push_back("run did not pinch");
        return rep;
    }
    if (rec.degenerate_pinch) {
        rep.notes.push_back("degenerate r-independent collapse: the final "
                            "profile law needs a quadratic pinch");
        rep.verdict = Verdict::inconclusive;
        return rep;
    }
    const RunSampler sam(rec);
    std::vector<double> xs(radii.begin(), radii.end());
    std::sort(xs.rbegin(), xs.rend());

    // below this radius the final snapshot is still actively collapsing and
    // carries no final-time information
    const double tau_f = sam.final_tau();
    const double x_floor = std::pow(tau_f, 0.55) * std::exp(-0.5 * tau_f);

    for (double x : xs) {
        if (!(x > 0.0 && x < 1.0))
            throw DomainError("verify_final_profile: radii must lie in (0,1)");
        if (x < x_floor) {
            rep.notes.push_back("radius " + std::to_string(x) +
                                " below resolution (inside the active zone)");
            continue;
        }
        double tau_used = 0.0;
        const auto u = sam.u_final(x, &tau_used);
        if (!u) {
            rep.notes.push_back("radius " + std::to_string(x) + " unresolved");
            continue;
        }
        const double ratio = *u * std::sqrt(-std::log(x)) / x;
        rep.samples.push_back({x, ratio, 1.0, std::fabs(ratio - 1.0)});
    }
    if (rep.samples.size() < 2) {
        rep.verdict = Verdict::inconclusive;
        return rep;
    }
    std::vector<double> dev;
    for (const auto& s : rep.samples) dev.push_back(s.deviation);
    rep.trend = classify_trend(dev, &rep.trend_slope);
    rep.tolerances["band"] = 0.4;
    const double decades =
        std::log10(rep.samples.front().input / rep.samples.back().input);
    if (decades < 1.5) {
        rep.notes.push_back("resolved span below 1.5 decades");
        rep.verdict = Verdict::inconclusive;
        return rep;
    }
    // Verdict is the trend over >= 1.5 decades; the convergence is
    // logarithmic, so no absolute band is imposed here (the acceptance
    // criterion applies its band over its own radii window). The band value
    // is reported for context.
    const bool tight = *std::max_element(dev.begin(), dev.end()) <= 1e-6;
    const bool decreasing = dev.back() < dev.front() && rep.trend != Trend::worsening;
    if (tight)
        rep.verdict = Verdict::pass;
    else if (decreasing)
        rep.verdict = Verdict::trend_pass;
    else
        rep.verdict = Verdict::fail;
    return rep;
}

VerificationReport verify_ratio_stability(const RunRecord& rec,
                                          std::span<const double> x1_points,
                                          double eps) {
    VerificationReport rep;
    rep.claim = "ratio_stability";
    rep.tolerances["eps"] = eps;
    if (rec.status != RunStatus::pinched) {
        rep.notes.push_back("run did not pinch");
        return rep;
    }
    if (rec.degenerate_pinch) {
        rep.notes.push_back("degenerate r-independent collapse: u(x1, t) keeps "
                            "shrinking everywhere, the claim's regime needs x1 "
                            "outside the collapsing set");
        rep.verdict = Verdict::inconclusive;
        return rep;
    }
    const RunSampler sam(rec);
    std::vector<double> xs(x1_points.begin(), x1_points.end());
    std::sort(xs.rbegin(), xs.rend());
    std::vector<double> sups;
    for (double x1 : xs) {
        const MatchingPoint mp = matching_tau(x1);
        const double t1_sim = sam.t_star() + mp.t1;
        const auto t_last = sam.latest_resolved_time(x1);
        if (!t_last || !(t1_sim < *t_last)) {
            rep.notes.push_back("x1 = " + std::to_string(x1) +
                                ": window [t1, t_last] unresolved");
            continue;
        }
        const auto u_ref = sam.u_at(x1, *t_last);
        if (!u_ref || !(*u_ref > 0.0)) continue;
        double sup = 0.0;
        bool any = false;
        for (std::size_t j = 0; j < rec.snapshots.size(); ++j) {
            const double tj = rec.snapshot_meta[j].t_unscaled;
            if (tj < t1_sim || tj > *t_last) continue;
            const auto u = sam.u_at(x1, tj);
            if (!u) continue;
            sup = std::max(sup, std::fabs(*u / *u_ref - 1.0));
            any = true;
        }
        if (!any) continue;
        rep.samples.push_back({x1, sup, 0.0, sup});
        sups.push_back(sup);
    }
    if (rep.samples.empty()) {
        rep.verdict = Verdict::inconclusive;
        return rep;
    }
    rep.trend = classify_trend(sups, &rep.trend_slope);
    const bool decreasing =
        sups.size() >= 2 && sups.back() < sups.front() && rep.trend != Trend::worsening;
    rep.verdict = judge(sups, eps, decreasing);
    return rep;
}

VerificationReport secondary_frame_checks(const RunRecord& rec, const MatchingPoint& mp) {
    VerificationReport rep;
    rep.claim = "secondary_frame";
    if (rec.status != RunStatus::pinched) {
        rep.notes.push_back("run did not pinch");
        return rep;
    }
    const RunSampler sam(rec);
    const double tau1 = mp.tau1;
    const double len2 = std::pow(tau1, 0.1) * (-mp.t1);
    const double len = std::sqrt(len2);
    const double z1 = std::sqrt(tau1);
    const double s_blow = std::pow(tau1, -0.1);

    const double tol_h0 = 3.0 * std::pow(tau1, -0.05);
    const double tol_diff = std::pow(tau1, -0.1);
    rep.tolerances["h_near_one"] = tol_h0;
    rep.tolerances["h_lower"] = 0.5;
    rep.tolerances["h_upper"] = 9.0;
    rep.tolerances["z_differences"] = tol_diff;
    rep.tolerances["ratio_dev"] = tol_h0;

    // z-window [z1-2, z1+2] sampled through an unscaled profile on [0, r_hi].
    // For s >= 0 the public transform applies; the pre-anchor slices (s < 0)
    // use the same scaling inline since to_secondary anchors at t1.
    const double r_hi = (z1 + 2.0) * len;
    const int n_r = 512;

    auto h_profile = [&](double s) -> std::optional<GridProfile> {
        const double t_rel = mp.t1 + s * len2;
        const double t_sim = sam.t_star() + t_rel;
        GridProfile p;
        p.frame = Frame::unscaled;
        p.timestamp = t_rel;
        p.radii.resize(n_r);
        p.values.resize(n_r);
        for (int i = 0; i < n_r; ++i) {
            const double r = r_hi * i / (n_r - 1);
            const auto u = sam.u_at(r, t_sim);
            if (!u) return std::nullopt;
            p.radii[static_cast<std::size_t>(i)] = r;
            p.values[static_cast<std::size_t>(i)] = *u;
        }
        if (s >= 0.0) return to_secondary(p, mp);
        GridProfile h;
        h.frame = Frame::secondary;
        h.timestamp = s;
        h.radii.resize(p.radii.size());
        h.values.resize(p.values.size());
        for (std::size_t i = 0; i < p.radii.size(); ++i) {
            h.radii[i] = p.radii[i] / len;
            h.values[i] = p.values[i] / len;
        }
        return h;
    };

    const double dz = 0.05;
    auto window_scan = [&](const GridProfile& hp, double* lo, double* hi,
                           double* d1, double* d2) {
        MonotoneCubic f(hp.radii, hp.values);
        for (double z = z1 - 2.0; z + 2.0 * dz <= z1 + 2.0; z += dz) {
            const double h_a = f(z), h_b = f(z + dz), h_c = f(z + 2.0 * dz);
            if (lo) *lo = std::min(*lo, h_a);
            if (hi) *hi = std::max(*hi, h_a);
            if (d1) *d1 = std::max(*d1, std::fabs((h_b - h_a) / dz));
            if (d2)
                *d2 = std::max(*d2, std::fabs((h_c - 2.0 * h_b + h_a) / (dz * dz)));
        }
    };

    // (i) h(z, 0) near 1 on ||z|-|z1|| <= 2
    double dev_h0 = -1.0;
    const auto h0 = h_profile(0.0);
    if (h0) {
        MonotoneCubic f(h0->radii, h0->values);
        dev_h0 = 0.0;
        for (int i = 0; i <= 80; ++i) {
            const double z = z1 - 2.0 + 4.0 * i / 80.0;
            dev_h0 = std::max(dev_h0, std::fabs(f(z) - 1.0));
        }
        rep.samples.push_back({1.0, dev_h0, 0.0, dev_h0});
    } else {
        rep.notes.push_back("s = 0 slice unresolved");
    }

    // (ii) 1/2 <= h <= 9 on the pre-anchor window s in [-1, 0], where resolved
    double h_min = 1e300, h_max = -1e300;
    double d1_max = 0.0, d2_max = 0.0;
    bool have_pre = false;
    for (int j = 0; j <= 8; ++j) {
        const auto hp = h_profile(-1.0 + j / 8.0);
        if (!hp) continue;
        window_scan(*hp, &h_min, &h_max, &d1_max, &d2_max);
        have_pre = true;
    }
    if (have_pre) {
        rep.samples.push_back({2.0, h_min, 0.5, std::max(0.0, 0.5 - h_min)});
        rep.samples.push_back({3.0, h_max, 9.0, std::max(0.0, h_max - 9.0)});
    } else {
        rep.notes.push_back("pre-anchor window s in [-1,0] unresolved");
    }

    // (iii) z-differences and (iv) h(z1, s)/h(z1, 0) over [0, 0.9 tau1^(-1/10)]
    double ratio_dev = -1.0;
    if (h0) {
        MonotoneCubic f0(h0->radii, h0->values);
        const double href = f0(z1);
        ratio_dev = 0.0;
        for (int j = 1; j <= 12; ++j) {
            const auto hp = h_profile(0.9 * s_blow * j / 12.0);
            if (!hp) {
                rep.notes.push_back("post-anchor window [0, 0.9 tau1^(-1/10)] "
                                    "not fully resolved");
                ratio_dev = -1.0;
                break;
            }
            window_scan(*hp, nullptr, nullptr, &d1_max, &d2_max);
            MonotoneCubic f(hp->radii, hp->values);
            ratio_dev = std::max(ratio_dev, std::fabs(f(z1) / href - 1.0));
        }
    }
    rep.samples.push_back({4.0, d1_max, 0.0, d1_max});
    rep.samples.push_back({5.0, d2_max, 0.0, d2_max});
    if (ratio_dev >= 0.0) rep.samples.push_back({6.0, ratio_dev, 0.0, ratio_dev});

    if (dev_h0 < 0.0 || !have_pre || ratio_dev < 0.0) {
        rep.verdict = Verdict::inconclusive;
        return rep;
    }

    const bool ok = dev_h0 <= tol_h0 && h_min >= 0.5 && h_max <= 9.0 &&
                    d1_max <= tol_diff && d2_max <= tol_diff && ratio_dev <= tol_h0;
    rep.verdict = ok ? Verdict::pass : Verdict::fail;
    if (rec.degenerate_pinch) {
        rep.notes.push_back("degenerate collapse: h(., 0) sits at sqrt(2) "
                            "tau1^(-1/20), outside the near-1 regime");
        if (rep.verdict == Verdict::fail) rep.verdict = Verdict::inconclusive;
    }
    return rep;
}

} // namespace pinchflow

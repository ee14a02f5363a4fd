#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pinchflow/geometry.hpp"
#include "pinchflow/interp.hpp"
#include "pinchflow/solver.hpp"

namespace pinchflow {

struct ClaimSample {
    double input = 0.0;    // the swept parameter (x1, radius, check id, ...)
    double measured = 0.0;
    double target = 0.0;
    double deviation = 0.0;
};

enum class Trend { improving, flat, worsening };
enum class Verdict { pass, trend_pass, fail, inconclusive };

const char* trend_name(Trend t);
const char* verdict_name(Verdict v);

/// Per-claim result: raw samples, the fitted deviation trend across the
/// sample range, and a verdict. pass needs every deviation within tolerance;
/// trend_pass needs deviations decreasing across the range.
struct VerificationReport {
    std::string claim;
    std::vector<ClaimSample> samples;
    Trend trend = Trend::flat;
    double trend_slope = 0.0;
    Verdict verdict = Verdict::inconclusive;
    std::map<std::string, double> tolerances;
    std::vector<std::string> notes;
};

/// Verdict from deviations and a uniform tolerance; factored out so the
/// monotonicity property (shrinking tolerance never improves a verdict) can
/// be tested directly.
Verdict judge(std::span<const double> deviations, double tolerance, bool decreasing);

/// Classify the deviation sequence; slope is the least-squares slope of
/// deviation against sample index.
Trend classify_trend(std::span<const double> deviations, double* slope_out);

/// Solve the matching equation e^(tau/2) |x1| = tau^(11/20) for the largest
/// root tau1 > 1 (bracketing + bisection with Newton polish on
/// f(tau) = tau/2 + ln x1 - (11/20) ln tau), and set t1 = -e^(-tau1).
/// Throws when x1 is too large for a root to exist.
MatchingPoint matching_tau(double x1_norm);

/// Interpolating view over a pinched run's snapshots: evaluates the unscaled
/// radius function u(x, t) wherever the zoomed grids resolve it.
class RunSampler {
  public:
    explicit RunSampler(const RunRecord& rec);

    double t_star() const { return t_star_; }
    double final_tau() const { return final_tau_; }

    /// u(x, t) with t in simulation time; nullopt when (x, t) falls outside
    /// the resolved region (x beyond the zoom window of the bracketing
    /// snapshots, or t outside the snapshot range).
    std::optional<double> u_at(double x, double t_sim) const;

    /// u(x) from the latest snapshot that still resolves x, with the tau of
    /// that snapshot; the numerical stand-in for the final-time value.
    std::optional<double> u_final(double x, double* tau_used) const;

    /// Latest snapshot time (simulation clock) resolving x.
    std::optional<double> latest_resolved_time(double x) const;

  private:
    const RunRecord* rec_;
    double t_star_;
    double final_tau_;
    std::vector<MonotoneCubic> interp_;
    std::vector<double> scale_; // sqrt(tstar_used - t) for rescaled, 1 otherwise
    std::vector<double> tau_;   // -ln(t_star - t) per snapshot

    std::optional<double> eval_snapshot(std::size_t j, double x) const;
};

/// -log|x1| = (tau1/2)(1+o(1)): ratios must climb toward 1 as x1 -> 0.
VerificationReport verify_log_relation(std::span<const double> x1_points);

/// u(x1, t1) = e^(-tau1/2) tau1^(1/20) (1+o(1)); deviations must shrink as
/// x1 -> 0. The exact-ansatz value of the measured ratio is
/// sqrt(1 + 2 tau1^(-1/10)), so tolerances carry a tau1^(-1/10) allowance.
VerificationReport verify_u_at_t1(const RunRecord& rec, std::span<const double> x1_points);

/// Final-profile law u0(x) = |x| / sqrt(-log|x|) (1+o(1)): the ratio
/// R(x) = u_final(x) sqrt(-ln x)/x must sit in a band around 1 with |R-1|
/// decreasing toward small x.
VerificationReport verify_final_profile(const RunRecord& rec, std::span<const double> radii);

/// sup over resolved t in [t1, t_last] of |u(x1,t)/u(x1,t_last) - 1| < eps,
/// with the sup decreasing across a shrinking x1 sequence.
VerificationReport verify_ratio_stability(const RunRecord& rec,
                                          std::span<const double> x1_points, double eps);

/// Secondary-frame checks at one matching point: h(.,0) near 1 on the
/// z-window, h within [1/2, 9] on the pre-anchor window, small first/second
/// z-differences, and the h-ratio staying near 1 up to s = 0.9 tau1^(-1/10).
VerificationReport secondary_frame_checks(const RunRecord& rec, const MatchingPoint& mp);

} // namespace pinchflow

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "fodkit/dataset.hpp"
#include "fodkit/errors.hpp"
#include "fodkit/gl_operator.hpp"
#include "fodkit/polynomial.hpp"

namespace fodkit {

/// Operator output at every sensor's impact parameter for one (nu, h).
struct FusionResult {
    double h = 0.0;
    std::size_t terms = 0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    std::vector<double> fused_values;
    double fused_mean = 0.0;
    double amplification = 0.0;           // K = mean(fused) / E
    std::vector<double> normalized_values; // fused / K, mean E by construction
    double normalized_std = 0.0;          // S
};

/// [min S_i, max S_i]
struct Window {
    double lo;
    double hi;
};

[[nodiscard]] inline Window impact_window(const SensorStats& stats) {
    const auto [lo, hi] = std::minmax_element(stats.stds.begin(), stats.stds.end());
    if (!(*lo < *hi))
        throw Error(ErrorKind::degenerate_window, "all sensor deviations are equal");
    return {*lo, *hi};
}

/// Applies the operator at x_i = S_i and normalises the result by the amplification factor.
/// Rejects steps for which the window holds no full step (n = 0 is a pure rescaling).
[[nodiscard]] inline FusionResult fuse_values(std::span<const double> xs, double reference_mean,
                                              const GlPlan& plan, const ScalarFunction auto& model) {
    FusionResult r;
    r.h = plan.h();
    r.terms = plan.terms();
    r.window_lo = plan.window_lo();
    r.window_hi = plan.window_hi();
    r.fused_values.reserve(xs.size());
    for (double x : xs)
        r.fused_values.push_back(gl_apply_model(model, plan, x));
    r.fused_mean = mean(r.fused_values);
    r.amplification = r.fused_mean / reference_mean;
    r.normalized_values.reserve(xs.size());
    for (double v : r.fused_values)
        r.normalized_values.push_back(v / r.amplification);
    r.normalized_std = population_std(r.normalized_values);
    return r;
}

[[nodiscard]] inline GlPlan fusion_plan(const SensorStats& stats, FractionalOrder nu, double h) {
    if (!std::isfinite(h) || h <= 0.0)
        throw Error(ErrorKind::invalid_argument, "step h must be positive");
    const Window w = impact_window(stats);
    GlPlan plan(nu, h, w.lo, w.hi);
    if (plan.terms() == 0)
        throw Error(ErrorKind::window_too_coarse,
                    "step " + std::to_string(h) + " is not smaller than the window length " +
                        std::to_string(w.hi - w.lo));
    return plan;
}

[[nodiscard]] inline FusionResult fuse(const PolynomialModel& model, const SensorStats& stats,
                                       FractionalOrder nu, double h) {
    const GlPlan plan = fusion_plan(stats, nu, h);
    return fuse_values(stats.stds, stats.true_value, plan, model);
}

struct CalibrationStep {
    double h;
    double normalized_std;
    double amplification;
    std::size_t terms;
};

struct CalibrationTrace {
    double target = 0.0;
    std::vector<CalibrationStep> steps;
    double final_h = 0.0;
    bool converged = false;
};

/// Probe plan for the step search. An explicit schedule takes precedence over
/// geometric shrinking from h0.
struct CalibrationOptions {
    std::vector<double> schedule;
    double h0 = 0.01;
    double shrink = 0.5;
    /// A probe with S <= S_G stops the search once S_G - S <= slack * S_G.
    /// slack = 1 stops at the first probe meeting the target.
    double slack = 1.0;
    std::size_t max_iters = 20;
};

inline constexpr double min_step = 1e-12;

inline void validate(const CalibrationOptions& opt) {
    if (!opt.schedule.empty()) {
        for (std::size_t i = 0; i < opt.schedule.size(); ++i) {
            if (!std::isfinite(opt.schedule[i]) || opt.schedule[i] <= 0.0)
                throw Error(ErrorKind::invalid_argument, "schedule entries must be positive");
            if (i > 0 && !(opt.schedule[i] < opt.schedule[i - 1]))
                throw Error(ErrorKind::invalid_argument, "schedule must be strictly decreasing");
        }
    } else {
        if (!std::isfinite(opt.h0) || opt.h0 <= 0.0)
            throw Error(ErrorKind::invalid_argument, "h0 must be positive");
        if (!(opt.shrink > 0.0 && opt.shrink < 1.0))
            throw Error(ErrorKind::invalid_argument, "shrink must lie in (0, 1)");
    }
    if (!(opt.slack > 0.0 && opt.slack <= 1.0))
        throw Error(ErrorKind::invalid_argument, "slack must lie in (0, 1]");
    if (opt.max_iters < 1)
        throw Error(ErrorKind::invalid_argument, "max_iters must be at least 1");
}

/// Stepwise search for h meeting the precision target S_G.
///
/// Probes h in decreasing order. A probe is accepted when S <= S_G and S is within
/// slack * S_G of the target; the search stops there. If the probes run out first,
/// the last probe that met S <= S_G is selected. No such probe means not converged.
[[nodiscard]] inline CalibrationTrace calibrate_step(const PolynomialModel& model,
                                                     const SensorStats& stats, FractionalOrder nu,
                                                     double target_std,
                                                     const CalibrationOptions& opt) {
    if (!std::isfinite(target_std) || target_std < 0.0)
        throw Error(ErrorKind::invalid_argument, "precision target must be non-negative");
    validate(opt);

    CalibrationTrace trace;
    trace.target = target_std;

    const std::size_t probes =
        opt.schedule.empty() ? opt.max_iters : std::min(opt.max_iters, opt.schedule.size());
    double h = opt.schedule.empty() ? opt.h0 : opt.schedule.front();
    bool satisfied_any = false;

    for (std::size_t i = 0; i < probes; ++i) {
        if (!opt.schedule.empty())
            h = opt.schedule[i];
        else if (i > 0)
            h *= opt.shrink;
        if (h < min_step)
            throw Error(ErrorKind::step_underflow, "step fell below 1e-12");

        const FusionResult r = fuse(model, stats, nu, h);
        trace.steps.push_back({h, r.normalized_std, r.amplification, r.terms});

        if (r.normalized_std <= target_std) {
            satisfied_any = true;
            trace.final_h = h;
            if (target_std - r.normalized_std <= opt.slack * target_std) {
                trace.converged = true;
                return trace;
            }
        }
    }
    trace.converged = satisfied_any;
    if (!satisfied_any)
        trace.final_h = trace.steps.back().h;
    return trace;
}

} // namespace fodkit

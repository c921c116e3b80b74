#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fodkit/calibration.hpp"
#include "fodkit/dataset.hpp"
#include "fodkit/errors.hpp"
#include "fodkit/gl_operator.hpp"
#include "fodkit/polynomial.hpp"

namespace fodkit {

/// (1 / attenuation)^(distance / segment): gain that offsets per-segment energy loss.
[[nodiscard]] inline double required_gain(double distance, double segment_length, double attenuation) {
    if (!std::isfinite(attenuation) || attenuation <= 0.0 || attenuation >= 1.0)
        throw Error(ErrorKind::invalid_attenuation, "attenuation coefficient must lie in (0, 1)");
    if (!std::isfinite(distance) || distance <= 0.0 || !std::isfinite(segment_length) ||
        segment_length <= 0.0)
        throw Error(ErrorKind::invalid_argument, "distance and segment length must be positive");
    return std::pow(1.0 / attenuation, distance / segment_length);
}

/// End-to-end amplification requirement, given directly or derived from a link budget.
struct GainTarget {
    struct Link {
        double distance;
        double segment_length;
        double attenuation;
    };

    double value = 1.0;
    std::optional<Link> link;

    static GainTarget direct(double gain) {
        if (!std::isfinite(gain) || gain <= 0.0)
            throw Error(ErrorKind::invalid_argument, "gain target must be positive and finite");
        return {gain, std::nullopt};
    }
    static GainTarget from_link(double distance, double segment_length, double attenuation) {
        return {required_gain(distance, segment_length, attenuation),
                Link{distance, segment_length, attenuation}};
    }
};

/// k^m by repeated multiplication.
[[nodiscard]] inline double power_by_multiplication(double k, std::size_t m) {
    double acc = 1.0;
    for (std::size_t i = 0; i < m; ++i)
        acc *= k;
    return acc;
}

inline constexpr std::size_t max_passes = 10000;

/// Smallest m with k^m >= K_g, i.e. K_g <= k^m < k^(m+1) with k^(m-1) < K_g.
[[nodiscard]] inline std::size_t iterations_needed(double k, double gain_target) {
    if (!std::isfinite(k) || k <= 0.0 || !std::isfinite(gain_target) || gain_target <= 0.0)
        throw Error(ErrorKind::invalid_argument, "k and the gain target must be positive");
    if (gain_target <= 1.0)
        return 0;
    if (k <= 1.0)
        throw Error(ErrorKind::gain_unreachable,
                    "per-pass amplification " + std::to_string(k) + " cannot reach gain " +
                        std::to_string(gain_target));
    const double estimate = std::ceil(std::log(gain_target) / std::log(k));
    if (!(estimate <= static_cast<double>(max_passes)))
        throw Error(ErrorKind::gain_unreachable,
                    "per-pass amplification " + std::to_string(k) + " would need more than " +
                        std::to_string(max_passes) + " passes");
    auto m = static_cast<std::size_t>(std::max(1.0, estimate));
    while (power_by_multiplication(k, m) < gain_target)
        ++m;
    while (m > 1 && power_by_multiplication(k, m - 1) >= gain_target)
        --m;
    return m;
}

struct PassRecord {
    std::size_t index = 0;     // 1-based
    double k = 0.0;            // mean(out) / mean(in)
    double normalized_std = 0.0;
    PolynomialModel model;     // refit of the pass input
    std::vector<double> values;
};

/// Result of the precision pass followed by m amplification passes.
///
/// The precision pass fuses the measurement model and divides by its amplification,
/// leaving values with mean E. Each amplification pass refits a polynomial of the
/// model's degree to (x_i, previous values) and applies the same operator again.
struct TransmissionPlan {
    FractionalOrder nu{0.0};
    double h = 0.0;
    std::size_t degree = 0;
    FusionResult initial;
    std::vector<PassRecord> passes;
    std::vector<double> final_values;
    double total_gain = 1.0; // mean(final) / E

    [[nodiscard]] std::size_t pass_count() const noexcept { return passes.size(); }
};

namespace detail {

inline PassRecord amplification_pass(const SensorStats& stats, const GlPlan& plan,
                                     std::size_t degree, std::span<const double> input,
                                     std::size_t index) {
    std::vector<Point> pts;
    pts.reserve(input.size());
    for (std::size_t i = 0; i < input.size(); ++i)
        pts.push_back({stats.stds[i], input[i]});

    PassRecord rec;
    rec.index = index;
    try {
        rec.model = polyfit(pts, degree);
    } catch (const Error& e) {
        throw Error(ErrorKind::iteration_refit, "pass " + std::to_string(index) + ": " + e.what());
    }
    rec.values.reserve(input.size());
    for (double x : stats.stds)
        rec.values.push_back(gl_apply_model(rec.model, plan, x));
    const double out_mean = mean(rec.values);
    rec.k = out_mean / mean(input);
    rec.normalized_std = population_std(rec.values) * stats.true_value / out_mean;
    return rec;
}

inline void finish(TransmissionPlan& plan, const SensorStats& stats) {
    plan.final_values = plan.passes.empty() ? plan.initial.normalized_values : plan.passes.back().values;
    plan.total_gain = mean(plan.final_values) / stats.true_value;
}

} // namespace detail

/// Runs `extra` further amplification passes from a stored plan.
[[nodiscard]] inline TransmissionPlan resume_fod(TransmissionPlan state, const SensorStats& stats,
                                                 std::size_t extra) {
    const GlPlan plan = fusion_plan(stats, state.nu, state.h);
    for (std::size_t p = 0; p < extra; ++p) {
        const std::vector<double>& input =
            state.passes.empty() ? state.initial.normalized_values : state.passes.back().values;
        state.passes.push_back(detail::amplification_pass(stats, plan, state.degree, input,
                                                          state.passes.size() + 1));
    }
    detail::finish(state, stats);
    return state;
}

[[nodiscard]] inline TransmissionPlan iterate_fod(const PolynomialModel& model,
                                                  const SensorStats& stats, FractionalOrder nu,
                                                  double h, std::size_t passes) {
    TransmissionPlan state;
    state.nu = nu;
    state.h = h;
    state.degree = model.degree();
    state.initial = fuse(model, stats, nu, h);
    return resume_fod(std::move(state), stats, passes);
}

} // namespace fodkit

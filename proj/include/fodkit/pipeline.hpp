#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fodkit/calibration.hpp"
#include "fodkit/dataset.hpp"
#include "fodkit/degree_selection.hpp"
#include "fodkit/direct_sum.hpp"
#include "fodkit/errors.hpp"
#include "fodkit/gl_operator.hpp"
#include "fodkit/polynomial.hpp"
#include "fodkit/transmission.hpp"

namespace fodkit {

struct PipelineConfig {
    FractionalOrder nu{0.5};
    double target_std = 0.005;
    GainTarget gain = GainTarget::direct(1.0);
    CalibrationOptions calibration;
    std::size_t degree_cap = 5;
};

enum class Outcome { ok, invalid_input, precision_unreachable, gain_unreachable, internal_error };
enum class Stage { none, stats, fit, calibration, planning, iteration };

[[nodiscard]] constexpr std::string_view to_string(Outcome o) noexcept {
    switch (o) {
    case Outcome::ok: return "ok";
    case Outcome::invalid_input: return "invalid-input";
    case Outcome::precision_unreachable: return "precision-unreachable";
    case Outcome::gain_unreachable: return "gain-unreachable";
    case Outcome::internal_error: return "internal-error";
    }
    return "unknown";
}

[[nodiscard]] constexpr std::string_view to_string(Stage s) noexcept {
    switch (s) {
    case Stage::none: return "none";
    case Stage::stats: return "stats";
    case Stage::fit: return "fit";
    case Stage::calibration: return "calibration";
    case Stage::planning: return "planning";
    case Stage::iteration: return "iteration";
    }
    return "unknown";
}

/// Everything a run produced, including partial tables when a stage failed.
struct PipelineReport {
    Outcome outcome = Outcome::internal_error;
    Stage failed_stage = Stage::none;
    std::string message;
    std::vector<std::string> warnings;

    std::optional<SensorDataset> dataset;
    std::optional<SensorStats> stats;
    std::optional<DegreeSelection> selection;
    std::optional<PolynomialModel> model;
    std::optional<CalibrationTrace> calibration;
    std::vector<FusionResult> probes; // one per calibration probe, in trace order

    double chosen_h = 0.0;
    double gain_target = 1.0;
    double planning_k = 0.0;       // pass amplification at chosen_h
    std::size_t iterations = 0;    // m
    double planned_gain = 1.0;     // k^m
    std::optional<TransmissionPlan> transmission;

    double pre_std = 0.0;  // S_x
    double post_std = 0.0; // normalized deviation of the final values

    [[nodiscard]] bool ok() const noexcept { return outcome == Outcome::ok; }
};

namespace detail {

inline Outcome outcome_for(ErrorKind kind, Stage stage) {
    switch (kind) {
    case ErrorKind::gain_unreachable: return Outcome::gain_unreachable;
    case ErrorKind::step_underflow: return Outcome::precision_unreachable;
    case ErrorKind::invalid_order:
    case ErrorKind::invalid_argument:
    case ErrorKind::empty_input:
    case ErrorKind::insufficient_data:
    case ErrorKind::invalid_attenuation:
    case ErrorKind::degenerate_window:
    case ErrorKind::window_too_coarse:
    case ErrorKind::parse:
        return Outcome::invalid_input;
    case ErrorKind::underdetermined_fit:
    case ErrorKind::singular_fit:
        return stage == Stage::fit ? Outcome::invalid_input : Outcome::internal_error;
    default: return Outcome::internal_error;
    }
}

} // namespace detail

/// stats -> degree selection + fit -> step calibration -> gain planning -> iterated passes.
[[nodiscard]] inline PipelineReport run_pipeline(const SensorDataset& dataset,
                                                 const PipelineConfig& config) {
    PipelineReport report;
    report.dataset = dataset;
    report.gain_target = config.gain.value;
    Stage stage = Stage::stats;
    try {
        report.stats = sensor_stats(dataset);
        const SensorStats& stats = *report.stats;
        report.pre_std = stats.system_std;

        stage = Stage::fit;
        std::vector<Point> points;
        for (std::size_t i = 0; i < stats.sensors(); ++i)
            points.push_back({stats.stds[i], stats.means[i]});
        const std::size_t cap = std::min(config.degree_cap, points.size() - 1);
        report.selection = select_degree(points, cap, std::min<std::size_t>(1, cap));
        report.model = polyfit(points, report.selection->chosen_degree);

        stage = Stage::calibration;
        report.calibration =
            calibrate_step(*report.model, stats, config.nu, config.target_std, config.calibration);
        for (const CalibrationStep& step : report.calibration->steps)
            report.probes.push_back(fuse(*report.model, stats, config.nu, step.h));
        if (!report.calibration->converged) {
            report.outcome = Outcome::precision_unreachable;
            report.failed_stage = stage;
            report.message = "no probed step met the precision target";
            return report;
        }
        report.chosen_h = report.calibration->final_h;

        stage = Stage::planning;
        const FusionResult initial = fuse(*report.model, stats, config.nu, report.chosen_h);
        report.planning_k = initial.amplification;
        if (config.gain.value < 1.0)
            report.warnings.push_back("gain target below 1 is already met; no amplification passes");
        report.iterations = iterations_needed(report.planning_k, config.gain.value);
        report.planned_gain = power_by_multiplication(report.planning_k, report.iterations);

        stage = Stage::iteration;
        report.transmission =
            iterate_fod(*report.model, stats, config.nu, report.chosen_h, report.iterations);
        const TransmissionPlan& tp = *report.transmission;
        report.post_std = tp.passes.empty() ? tp.initial.normalized_std : tp.passes.back().normalized_std;

        const double mismatch = std::abs(tp.total_gain - report.planned_gain) / report.planned_gain;
        if (mismatch > 1e-3)
            report.warnings.push_back("realized gain differs from planned k^m by " +
                                      std::to_string(mismatch * 100.0) + "%");
        if (tp.total_gain < config.gain.value) {
            report.outcome = Outcome::gain_unreachable;
            report.failed_stage = stage;
            report.message = "realized gain falls short of the target";
            return report;
        }
        report.outcome = Outcome::ok;
        return report;
    } catch (const Error& e) {
        report.outcome = detail::outcome_for(e.kind(), stage);
        report.failed_stage = stage;
        report.message = e.what();
    } catch (const std::exception& e) {
        report.outcome = Outcome::internal_error;
        report.failed_stage = stage;
        report.message = e.what();
    }
    return report;
}

struct VerificationCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct VerificationSummary {
    std::vector<VerificationCheck> checks;

    [[nodiscard]] bool all_passed() const noexcept {
        return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
    }
    [[nodiscard]] const VerificationCheck* find(std::string_view name) const noexcept {
        for (const auto& c : checks)
            if (c.name == name)
                return &c;
        return nullptr;
    }
};

namespace detail {

inline bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

} // namespace detail

/// Re-derives every claim in the report from its own inputs via the direct-summation path.
[[nodiscard]] inline VerificationSummary verify_report(const PipelineReport& report,
                                                       const PipelineConfig& config) {
    VerificationSummary out;
    auto add = [&](std::string name, bool passed, std::string detail) {
        out.checks.push_back({std::move(name), passed, std::move(detail)});
    };
    constexpr double tol = 1e-9;

    if (report.dataset && report.stats) {
        const auto& ds = *report.dataset;
        bool ok = true;
        double grand = 0.0;
        for (std::size_t c = 0; c < ds.sensors(); ++c) {
            double sum = 0.0;
            for (const auto& row : ds.rows())
                sum += row[c];
            const double m = sum / static_cast<double>(ds.measurements());
            grand += m;
            ok = ok && detail::close_rel(m, report.stats->means[c], tol);
        }
        ok = ok && detail::close_rel(grand / static_cast<double>(ds.sensors()), report.stats->true_value, tol);
        add("stats", ok, "per-sensor means and true value recomputed from raw readings");
    }

    if (report.model && report.stats && report.calibration) {
        const auto& st = *report.stats;
        const double lo = *std::min_element(st.stds.begin(), st.stds.end());
        const double hi = *std::max_element(st.stds.begin(), st.stds.end());
        bool ok = report.probes.size() == report.calibration->steps.size();
        for (std::size_t p = 0; ok && p < report.probes.size(); ++p) {
            const auto& step = report.calibration->steps[p];
            const std::size_t n = term_count(hi - lo, step.h);
            std::vector<double> fused;
            for (double x : st.stds)
                fused.push_back(static_cast<double>(direct::fractional_sum(
                    report.model->coefficients(), config.nu.value(), step.h, n, x)));
            const double k = mean(fused) / st.true_value;
            std::vector<double> normalized;
            for (double v : fused)
                normalized.push_back(v / k);
            ok = ok && n == step.terms && detail::close_rel(k, step.amplification, tol) &&
                 std::abs(population_std(normalized) - step.normalized_std) <= tol * st.true_value;
        }
        add("calibration_oracle", ok, "every probe's K and S recomputed by direct summation");
    }

    if (!report.transmission)
        return out;
    const TransmissionPlan& tp = *report.transmission;
    const double gain = config.gain.value;
    const double k = report.planning_k;
    const std::size_t m = report.iterations;

    add("precision", report.post_std <= config.target_std,
        "post deviation " + std::to_string(report.post_std) + " vs target " +
            std::to_string(config.target_std));

    bool bracket = true;
    if (gain > 1.0) {
        double km = 1.0;
        for (std::size_t i = 0; i < m; ++i)
            km *= k;
        const double km_prev = m == 0 ? 0.0 : km / k;
        bracket = gain <= km && (m == 0 || km_prev < gain) && km * k > km;
    } else {
        bracket = m == 0;
    }
    add("bracket", bracket, "K_g <= k^m and k^(m-1) < K_g by direct multiplication");

    double product = 1.0;
    for (const auto& pass : tp.passes)
        product *= pass.k;
    add("product_identity", detail::close_rel(tp.total_gain, product, tol),
        "total gain equals the product of per-pass factors");
    add("gain", tp.total_gain >= gain, "realized total gain meets the target");

    if (report.model && report.stats) {
        const auto& st = *report.stats;
        const double lo = *std::min_element(st.stds.begin(), st.stds.end());
        const double hi = *std::max_element(st.stds.begin(), st.stds.end());
        const std::size_t n = term_count(hi - lo, tp.h);
        std::vector<double> values;
        for (double x : st.stds)
            values.push_back(static_cast<double>(
                direct::fractional_sum(report.model->coefficients(), config.nu.value(), tp.h, n, x)));
        const double k0 = mean(values) / st.true_value;
        for (double& v : values)
            v /= k0;
        for (std::size_t p = 0; p < tp.passes.size(); ++p) {
            const auto coeffs = direct::normal_equation_fit(st.stds, values, tp.degree);
            std::vector<double> next;
            for (double x : st.stds)
                next.push_back(static_cast<double>(
                    direct::fractional_sum(coeffs, config.nu.value(), tp.h, n, x)));
            values = std::move(next);
        }
        bool ok = values.size() == tp.final_values.size();
        for (std::size_t i = 0; ok && i < values.size(); ++i)
            ok = detail::close_rel(values[i], tp.final_values[i], tol);
        add("oracle_final_values", ok, "final values recomputed by direct summation");
    }
    return out;
}

} // namespace fodkit

#pragma once

// Command implementations behind the fodkit CLI. Each command builds a
// ReportBundle and an exit status; writing the bundle is a separate step so the
// commands can run in-process.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fodkit/calibration.hpp"
#include "fodkit/config.hpp"
#include "fodkit/dataset.hpp"
#include "fodkit/degree_selection.hpp"
#include "fodkit/errors.hpp"
#include "fodkit/io.hpp"
#include "fodkit/pipeline.hpp"
#include "fodkit/report.hpp"
#include "fodkit/transmission.hpp"

namespace fodkit::cli {

/// Stable process exit codes.
enum ExitCode : int {
    exit_ok = 0,
    exit_parse = 2,
    exit_precision_unreachable = 3,
    exit_gain_unreachable = 4,
    exit_internal = 5,
};

[[nodiscard]] inline int exit_code(Outcome o) noexcept {
    switch (o) {
    case Outcome::ok: return exit_ok;
    case Outcome::invalid_input: return exit_parse;
    case Outcome::precision_unreachable: return exit_precision_unreachable;
    case Outcome::gain_unreachable: return exit_gain_unreachable;
    case Outcome::internal_error: return exit_internal;
    }
    return exit_internal;
}

[[nodiscard]] inline int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::gain_unreachable: return exit_gain_unreachable;
    case ErrorKind::step_underflow: return exit_precision_unreachable;
    case ErrorKind::invalid_order:
    case ErrorKind::invalid_argument:
    case ErrorKind::empty_input:
    case ErrorKind::insufficient_data:
    case ErrorKind::invalid_attenuation:
    case ErrorKind::degenerate_window:
    case ErrorKind::window_too_coarse:
    case ErrorKind::parse:
    case ErrorKind::io:
        return exit_parse;
    default: return exit_internal;
    }
}

struct CommandResult {
    int code = exit_internal;
    ReportBundle bundle;
    std::string message;
};

struct SpectraOptions {
    std::vector<double> orders{0.2, 0.5, 0.8, 1.0};
    double omega_max = 10.0;
    std::size_t points = 101;
};

namespace detail {

inline SensorDataset load_input(const RunConfig& cfg) {
    if (!cfg.input)
        throw ParseError(1, "missing input dataset path");
    return io::parse_dataset(*cfg.input);
}

struct FittedModel {
    SensorStats stats;
    DegreeSelection selection;
    PolynomialModel model;
};

inline std::vector<Point> impact_points(const SensorStats& st) {
    std::vector<Point> pts;
    for (std::size_t i = 0; i < st.sensors(); ++i)
        pts.push_back({st.stds[i], st.means[i]});
    return pts;
}

inline FittedModel fit_dataset(const SensorDataset& ds, const RunConfig& cfg) {
    FittedModel f;
    f.stats = sensor_stats(ds);
    const auto pts = impact_points(f.stats);
    const std::size_t cap = std::min(cfg.degree_cap.value_or(5), pts.size() - 1);
    f.selection = select_degree(pts, cap, std::min<std::size_t>(1, cap));
    f.model = polyfit(pts, f.selection.chosen_degree);
    return f;
}

template <typename Body>
CommandResult guarded(Body&& body) {
    CommandResult r;
    try {
        body(r);
    } catch (const Error& e) {
        r.code = exit_code(e.kind());
        r.message = e.what();
    } catch (const std::exception& e) {
        r.code = exit_internal;
        r.message = e.what();
    }
    if (r.code != exit_ok && !r.message.empty())
        r.bundle.notes.push_back("error: " + r.message);
    return r;
}

inline Table key_values(std::string name) { return Table{std::move(name), {"quantity", "value"}, {}}; }

} // namespace detail

/// Per-sensor means and deviations, true value and system deviation.
[[nodiscard]] inline CommandResult cmd_stats(const RunConfig& cfg) {
    return detail::guarded([&](CommandResult& r) {
        const SensorDataset ds = detail::load_input(cfg);
        const SensorStats st = sensor_stats(ds);
        Table sys = detail::key_values("summary");
        sys.add({"sensors", std::to_string(ds.sensors())});
        sys.add({"measurements", std::to_string(ds.measurements())});
        sys.add({"true_value", format_number(st.true_value)});
        sys.add({"system_std", format_number(st.system_std)});
        r.bundle.tables.push_back(std::move(sys));
        r.bundle.tables.push_back(dataset_table(ds));
        r.bundle.tables.push_back(stats_table(ds, st));
        r.code = exit_ok;
    });
}

/// Degree selection and the fitted measurement model.
[[nodiscard]] inline CommandResult cmd_fit(const RunConfig& cfg) {
    return detail::guarded([&](CommandResult& r) {
        const SensorDataset ds = detail::load_input(cfg);
        const auto f = detail::fit_dataset(ds, cfg);
        Table sys = detail::key_values("summary");
        sys.add({"true_value", format_number(f.stats.true_value)});
        sys.add({"system_std", format_number(f.stats.system_std)});
        sys.add({"chosen_degree", std::to_string(f.selection.chosen_degree)});
        sys.add({"domain_lo", format_number(f.model.domain_lo())});
        sys.add({"domain_hi", format_number(f.model.domain_hi())});
        r.bundle.tables.push_back(std::move(sys));
        r.bundle.tables.push_back(stats_table(ds, f.stats));
        r.bundle.tables.push_back(degree_table(f.selection));
        r.bundle.tables.push_back(model_table(f.model));
        r.code = exit_ok;
    });
}

/// Amplitude/phase curves of the operator for several orders on [0, omega_max].
[[nodiscard]] inline CommandResult cmd_spectra(const SpectraOptions& opt) {
    return detail::guarded([&](CommandResult& r) {
        if (opt.points < 2 || !(opt.omega_max > 0.0))
            throw Error(ErrorKind::invalid_argument, "need omega_max > 0 and at least 2 points");
        if (opt.orders.empty())
            throw Error(ErrorKind::invalid_argument, "no orders given");
        std::vector<double> omegas;
        for (std::size_t i = 0; i < opt.points; ++i)
            omegas.push_back(opt.omega_max * static_cast<double>(i) / static_cast<double>(opt.points - 1));
        auto [amp, phase] = spectra_plots(opt.orders, omegas);
        Table sys = detail::key_values("summary");
        sys.add({"orders", std::to_string(opt.orders.size())});
        sys.add({"omega_max", format_number(opt.omega_max)});
        sys.add({"points", std::to_string(opt.points)});
        r.bundle.tables.push_back(std::move(sys));
        r.bundle.plots.push_back(std::move(amp));
        r.bundle.plots.push_back(std::move(phase));
        r.code = exit_ok;
    });
}

/// Stepwise search for h meeting target_std.
[[nodiscard]] inline CommandResult cmd_calibrate(const RunConfig& cfg) {
    return detail::guarded([&](CommandResult& r) {
        const SensorDataset ds = detail::load_input(cfg);
        if (!cfg.target_std)
            throw ParseError(1, "missing target_std");
        const FractionalOrder nu(cfg.nu.value_or(0.5));
        const auto f = detail::fit_dataset(ds, cfg);
        const CalibrationTrace trace =
            calibrate_step(f.model, f.stats, nu, *cfg.target_std, calibration_options(cfg));

        Table sys = detail::key_values("summary");
        sys.add({"target_std", format_number(trace.target)});
        sys.add({"converged", trace.converged ? "yes" : "no"});
        sys.add({"final_h", format_number(trace.final_h)});
        sys.add({"probes", std::to_string(trace.steps.size())});
        r.bundle.tables.push_back(std::move(sys));
        r.bundle.tables.push_back(stats_table(ds, f.stats));
        r.bundle.tables.push_back(model_table(f.model));
        r.bundle.tables.push_back(calibration_table(trace));
        std::vector<double> hs;
        for (std::size_t i = 0; i < trace.steps.size(); ++i) {
            hs.push_back(trace.steps[i].h);
            r.bundle.tables.push_back(fusion_table("fusion_probe" + std::to_string(i + 1), ds, f.stats,
                                                   fuse(f.model, f.stats, nu, trace.steps[i].h)));
        }
        r.bundle.plots.push_back(calibration_plot(trace));
        const Window w = impact_window(f.stats);
        r.bundle.plots.push_back(step_polyline_plot(render_step_polylines(f.model, nu, hs, w.lo, w.hi)));
        r.code = trace.converged ? exit_ok : exit_precision_unreachable;
        if (!trace.converged)
            r.message = "no probed step met the precision target";
    });
}

/// Pass count for a gain target. With `k` the plan is purely arithmetic; otherwise
/// k is measured on the dataset at h0 and the passes are executed.
[[nodiscard]] inline CommandResult cmd_plan(const RunConfig& cfg, std::optional<double> k) {
    return detail::guarded([&](CommandResult& r) {
        const GainTarget gain = gain_target(cfg);
        Table sys = detail::key_values("summary");
        sys.add({"gain_target", format_number(gain.value)});

        double per_pass = 0.0;
        std::optional<SensorDataset> ds;
        std::optional<detail::FittedModel> f;
        if (k) {
            per_pass = *k;
        } else {
            ds = detail::load_input(cfg);
            f = detail::fit_dataset(*ds, cfg);
            per_pass = fuse(f->model, f->stats, FractionalOrder(cfg.nu.value_or(0.5)),
                            cfg.h0.value_or(0.01))
                           .amplification;
        }
        sys.add({"k", format_number(per_pass)});
        r.bundle.tables.push_back(sys);

        const std::size_t m = iterations_needed(per_pass, gain.value);
        Table plan{"plan", {"k", "gain_target", "m", "k_pow_m", "k_pow_m_minus_1"}, {}};
        plan.add({format_number(per_pass), format_number(gain.value), std::to_string(m),
                  format_number(power_by_multiplication(per_pass, m)),
                  m == 0 ? "" : format_number(power_by_multiplication(per_pass, m - 1))});
        r.bundle.tables.push_back(std::move(plan));

        if (f) {
            const TransmissionPlan tp = iterate_fod(f->model, f->stats, FractionalOrder(cfg.nu.value_or(0.5)),
                                                    cfg.h0.value_or(0.01), m);
            r.bundle.tables.push_back(passes_table(tp));
            r.bundle.tables.push_back(final_table(*ds, f->stats, tp));
            r.bundle.plots.push_back(passes_plot(tp));
        }
        r.code = exit_ok;
    });
}

/// The full pipeline.
[[nodiscard]] inline CommandResult cmd_run(const RunConfig& cfg) {
    return detail::guarded([&](CommandResult& r) {
        const SensorDataset ds = detail::load_input(cfg);
        const PipelineConfig pc = pipeline_config(cfg);
        const PipelineReport report = run_pipeline(ds, pc);
        r.bundle = pipeline_bundle(report, pc);
        r.code = exit_code(report.outcome);
        if (!report.ok())
            r.message = std::string(to_string(report.outcome)) + " at " +
                        std::string(to_string(report.failed_stage)) + ": " + report.message;
    });
}

/// Writes the bundle (also on failure, so partial tables survive). Returns the
/// command's exit code, or exit_internal if writing fails.
inline int write_result(const CommandResult& result, const std::filesystem::path& dir) {
    try {
        result.bundle.write(dir);
    } catch (const std::exception&) {
        return exit_internal;
    }
    return result.code;
}

} // namespace fodkit::cli

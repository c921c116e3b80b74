#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fodkit/calibration.hpp"
#include "fodkit/dataset.hpp"
#include "fodkit/degree_selection.hpp"
#include "fodkit/errors.hpp"
#include "fodkit/gl_operator.hpp"
#include "fodkit/io.hpp"
#include "fodkit/pipeline.hpp"
#include "fodkit/polynomial.hpp"
#include "fodkit/transmission.hpp"

namespace fodkit {

/// A named grid of pre-formatted cells. Tables become table_<name>.csv,
/// plots become plot_<name>.tsv.
struct Table {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }

    [[nodiscard]] std::string render(char sep) const {
        std::string out;
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i)
                    out += sep;
                out += quote_if_needed(cells[i], sep);
            }
            out += '\n';
        };
        line(header);
        for (const auto& r : rows)
            line(r);
        return out;
    }

    [[nodiscard]] static std::string quote_if_needed(const std::string& cell, char sep) {
        if (cell.find_first_of(std::string{sep, '"', '\n'}) == std::string::npos)
            return cell;
        std::string q = "\"";
        for (char c : cell) {
            if (c == '"')
                q += '"';
            q += c;
        }
        return q + "\"";
    }

    /// Space-aligned plain text.
    [[nodiscard]] std::string render_text() const {
        std::vector<std::size_t> width(header.size(), 0);
        auto measure = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size() && i < width.size(); ++i)
                width[i] = std::max(width[i], cells[i].size());
        };
        measure(header);
        for (const auto& r : rows)
            measure(r);
        std::string out;
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                out += cells[i];
                if (i + 1 < cells.size())
                    out += std::string(width[i] - cells[i].size() + 2, ' ');
            }
            out += '\n';
        };
        line(header);
        for (const auto& r : rows)
            line(r);
        return out;
    }
};

using io::format_number;

class ReportBundle {
public:
    std::vector<Table> tables;
    std::vector<Table> plots;
    std::vector<std::string> notes;

    [[nodiscard]] const Table* table(std::string_view name) const {
        for (const auto& t : tables)
            if (t.name == name)
                return &t;
        return nullptr;
    }

    /// Plain-text rendering of every table; numbers are the same strings as in the CSVs.
    [[nodiscard]] std::string summary() const {
        std::string out;
        for (const auto& n : notes)
            out += n + "\n";
        if (!notes.empty())
            out += "\n";
        for (const auto& t : tables) {
            out += "== " + t.name + " ==\n";
            out += t.render_text();
            out += "\n";
        }
        return out;
    }

    /// Writes files in a fixed order; each file is replaced atomically.
    void write(const std::filesystem::path& dir) const {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec)
            throw Error(ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());
        for (const auto& t : tables)
            io::write_file_atomic(dir / ("table_" + t.name + ".csv"), t.render(','));
        for (const auto& p : plots)
            io::write_file_atomic(dir / ("plot_" + p.name + ".tsv"), p.render('\t'));
        io::write_file_atomic(dir / "summary.txt", summary());
    }
};

// ---------------------------------------------------------------------------
// Table builders

[[nodiscard]] inline Table dataset_table(const SensorDataset& ds) {
    Table t{"dataset", {"measurement"}, {}};
    for (const auto& id : ds.sensor_ids())
        t.header.push_back(id);
    for (std::size_t r = 0; r < ds.measurements(); ++r) {
        std::vector<std::string> row{std::to_string(r + 1)};
        for (double v : ds.rows()[r])
            row.push_back(format_number(v));
        t.add(std::move(row));
    }
    return t;
}

[[nodiscard]] inline Table stats_table(const SensorDataset& ds, const SensorStats& st) {
    Table t{"stats", {"sensor", "mean", "std"}, {}};
    for (std::size_t i = 0; i < st.sensors(); ++i)
        t.add({ds.sensor_ids()[i], format_number(st.means[i]), format_number(st.stds[i])});
    return t;
}

[[nodiscard]] inline Table degree_table(const DegreeSelection& sel) {
    Table t{"degree_selection", {"degree", "loo_abs_error", "status"}, {}};
    std::size_t hi = 0;
    for (const auto& [d, e] : sel.total_error_by_degree)
        hi = std::max(hi, d);
    for (const auto& [d, e] : sel.excluded)
        hi = std::max(hi, d);
    for (std::size_t d = 0; d <= hi; ++d) {
        if (auto it = sel.total_error_by_degree.find(d); it != sel.total_error_by_degree.end())
            t.add({std::to_string(d), format_number(it->second),
                   d == sel.chosen_degree ? "chosen" : "scored"});
        else if (auto ex = sel.excluded.find(d); ex != sel.excluded.end())
            t.add({std::to_string(d), "", "excluded: " + ex->second});
    }
    return t;
}

[[nodiscard]] inline Table model_table(const PolynomialModel& model) {
    Table t{"model", {"power", "coefficient"}, {}};
    for (std::size_t k = 0; k < model.coefficients().size(); ++k)
        t.add({std::to_string(k), format_number(model.coefficients()[k])});
    return t;
}

[[nodiscard]] inline Table calibration_table(const CalibrationTrace& trace) {
    Table t{"calibration", {"probe", "h", "terms", "normalized_std", "amplification", "meets_target"}, {}};
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const auto& s = trace.steps[i];
        t.add({std::to_string(i + 1), format_number(s.h), std::to_string(s.terms),
               format_number(s.normalized_std), format_number(s.amplification),
               s.normalized_std <= trace.target ? "yes" : "no"});
    }
    return t;
}

[[nodiscard]] inline Table fusion_table(std::string name, const SensorDataset& ds,
                                        const SensorStats& st, const FusionResult& r) {
    Table t{std::move(name), {"sensor", "mean", "std", "fused", "normalized"}, {}};
    for (std::size_t i = 0; i < st.sensors(); ++i)
        t.add({ds.sensor_ids()[i], format_number(st.means[i]), format_number(st.stds[i]),
               format_number(r.fused_values[i]), format_number(r.normalized_values[i])});
    return t;
}

[[nodiscard]] inline Table passes_table(const TransmissionPlan& tp) {
    Table t{"passes", {"pass", "k", "normalized_std", "mean", "cumulative_gain"}, {}};
    double cumulative = 1.0;
    for (const auto& p : tp.passes) {
        cumulative *= p.k;
        t.add({std::to_string(p.index), format_number(p.k), format_number(p.normalized_std),
               format_number(mean(p.values)), format_number(cumulative)});
    }
    return t;
}

[[nodiscard]] inline Table final_table(const SensorDataset& ds, const SensorStats& st,
                                       const TransmissionPlan& tp) {
    Table t{"final", {"sensor", "mean", "std", "fused_normalized", "final"}, {}};
    for (std::size_t i = 0; i < st.sensors(); ++i)
        t.add({ds.sensor_ids()[i], format_number(st.means[i]), format_number(st.stds[i]),
               format_number(tp.initial.normalized_values[i]), format_number(tp.final_values[i])});
    return t;
}

[[nodiscard]] inline Table verification_table(const VerificationSummary& v) {
    Table t{"verification", {"check", "passed", "detail"}, {}};
    for (const auto& c : v.checks)
        t.add({c.name, c.passed ? "yes" : "no", c.detail});
    return t;
}

[[nodiscard]] inline Table calibration_plot(const CalibrationTrace& trace) {
    Table t{"calibration", {"h", "normalized_std", "amplification"}, {}};
    for (const auto& s : trace.steps)
        t.add({format_number(s.h), format_number(s.normalized_std), format_number(s.amplification)});
    return t;
}

[[nodiscard]] inline Table passes_plot(const TransmissionPlan& tp) {
    Table t{"passes", {"pass", "k", "cumulative_gain"}, {}};
    double cumulative = 1.0;
    for (const auto& p : tp.passes) {
        cumulative *= p.k;
        t.add({std::to_string(p.index), format_number(p.k), format_number(cumulative)});
    }
    return t;
}

// ---------------------------------------------------------------------------
// Plot data

/// Amplitude and phase columns, one per order, over the given frequencies.
[[nodiscard]] inline std::pair<Table, Table> spectra_plots(std::span<const double> orders,
                                                           std::span<const double> omegas) {
    Table amp{"spectra_amplitude", {"omega"}, {}};
    Table phase{"spectra_phase", {"omega"}, {}};
    std::vector<std::vector<SpectralPoint>> curves;
    for (double nu : orders) {
        amp.header.push_back("nu=" + format_number(nu));
        phase.header.push_back("nu=" + format_number(nu));
        curves.push_back(spectral_response(FractionalOrder(nu), omegas));
    }
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        std::vector<std::string> a{format_number(omegas[i])};
        std::vector<std::string> p{format_number(omegas[i])};
        for (const auto& c : curves) {
            a.push_back(format_number(c[i].amplitude));
            p.push_back(format_number(c[i].phase));
        }
        amp.add(std::move(a));
        phase.add(std::move(p));
    }
    return {std::move(amp), std::move(phase)};
}

struct StepPolylines {
    std::vector<double> x;
    std::vector<double> reference;             // exact small-step limit
    std::vector<double> steps;
    std::vector<std::vector<double>> polylines; // one per step, sampled at x
};

/// Operator output of the model across [lo, hi] for each step, next to the exact
/// h -> 0 curve with the same memory length.
[[nodiscard]] inline StepPolylines render_step_polylines(const PolynomialModel& model, FractionalOrder nu,
                                                    std::span<const double> steps, double lo,
                                                    double hi, std::size_t samples = 101) {
    if (!(lo < hi))
        throw Error(ErrorKind::degenerate_window, "plot window requires lo < hi");
    if (samples < 2)
        throw Error(ErrorKind::invalid_argument, "need at least two samples");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (!(steps[i] > 0.0))
            throw Error(ErrorKind::invalid_argument, "steps must be positive");
        for (std::size_t j = 0; j < i; ++j)
            if (steps[i] == steps[j])
                throw Error(ErrorKind::invalid_argument, "steps must be distinct");
    }
    StepPolylines out;
    out.steps.assign(steps.begin(), steps.end());
    const double memory = hi - lo;
    for (std::size_t i = 0; i < samples; ++i)
        out.x.push_back(lo + memory * static_cast<double>(i) / static_cast<double>(samples - 1));
    for (double x : out.x)
        out.reference.push_back(gl_limit_polynomial(model, nu, memory, x));
    for (double h : steps) {
        const GlPlan plan(nu, h, lo, hi);
        std::vector<double> line;
        for (double x : out.x)
            line.push_back(gl_apply_model(model, plan, x));
        out.polylines.push_back(std::move(line));
    }
    return out;
}

[[nodiscard]] inline Table step_polyline_plot(const StepPolylines& d) {
    Table t{"step_polylines", {"x", "reference"}, {}};
    for (double h : d.steps)
        t.header.push_back("h=" + format_number(h));
    for (std::size_t i = 0; i < d.x.size(); ++i) {
        std::vector<std::string> row{format_number(d.x[i]), format_number(d.reference[i])};
        for (const auto& line : d.polylines)
            row.push_back(format_number(line[i]));
        t.add(std::move(row));
    }
    return t;
}

// ---------------------------------------------------------------------------

/// Headline scalars of a pipeline run.
[[nodiscard]] inline Table run_summary_table(const PipelineReport& r) {
    Table t{"summary", {"quantity", "value"}, {}};
    t.add({"outcome", std::string(to_string(r.outcome))});
    if (r.outcome != Outcome::ok) {
        t.add({"failed_stage", std::string(to_string(r.failed_stage))});
        t.add({"message", r.message});
    }
    if (r.stats) {
        t.add({"true_value", format_number(r.stats->true_value)});
        t.add({"system_std", format_number(r.stats->system_std)});
    }
    if (r.selection)
        t.add({"chosen_degree", std::to_string(r.selection->chosen_degree)});
    if (r.calibration) {
        t.add({"target_std", format_number(r.calibration->target)});
        t.add({"calibration_converged", r.calibration->converged ? "yes" : "no"});
    }
    if (r.calibration && r.calibration->converged)
        t.add({"h", format_number(r.chosen_h)});
    t.add({"gain_target", format_number(r.gain_target)});
    if (r.planning_k > 0.0)
        t.add({"k", format_number(r.planning_k)});
    if (r.transmission) {
        t.add({"m", std::to_string(r.iterations)});
        t.add({"planned_gain", format_number(r.planned_gain)});
        t.add({"total_gain", format_number(r.transmission->total_gain)});
        t.add({"final_mean", format_number(mean(r.transmission->final_values))});
        t.add({"pre_std", format_number(r.pre_std)});
        t.add({"post_std", format_number(r.post_std)});
    }
    return t;
}

[[nodiscard]] inline ReportBundle pipeline_bundle(const PipelineReport& r, const PipelineConfig& cfg) {
    ReportBundle b;
    b.tables.push_back(run_summary_table(r));
    if (r.dataset)
        b.tables.push_back(dataset_table(*r.dataset));
    if (r.dataset && r.stats)
        b.tables.push_back(stats_table(*r.dataset, *r.stats));
    if (r.selection)
        b.tables.push_back(degree_table(*r.selection));
    if (r.model)
        b.tables.push_back(model_table(*r.model));
    if (r.calibration) {
        b.tables.push_back(calibration_table(*r.calibration));
        b.plots.push_back(calibration_plot(*r.calibration));
    }
    for (std::size_t i = 0; i < r.probes.size(); ++i)
        b.tables.push_back(fusion_table("fusion_probe" + std::to_string(i + 1), *r.dataset, *r.stats,
                                        r.probes[i]));
    if (r.transmission) {
        b.tables.push_back(passes_table(*r.transmission));
        b.tables.push_back(final_table(*r.dataset, *r.stats, *r.transmission));
        b.plots.push_back(passes_plot(*r.transmission));
    }
    if (r.model && r.stats && r.calibration && !r.calibration->steps.empty()) {
        std::vector<double> hs;
        for (const auto& s : r.calibration->steps)
            hs.push_back(s.h);
        const Window w = impact_window(*r.stats);
        b.plots.push_back(step_polyline_plot(render_step_polylines(*r.model, cfg.nu, hs, w.lo, w.hi)));
    }
    b.tables.push_back(verification_table(verify_report(r, cfg)));
    for (const auto& w : r.warnings)
        b.notes.push_back("warning: " + w);
    return b;
}

} // namespace fodkit

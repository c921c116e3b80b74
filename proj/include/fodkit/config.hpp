#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fodkit/calibration.hpp"
#include "fodkit/errors.hpp"
#include "fodkit/io.hpp"
#include "fodkit/pipeline.hpp"
#include "fodkit/transmission.hpp"

namespace fodkit {

/// key=value run settings. Every field is optional so that a file and
/// command-line overrides can be layered with merge().
struct RunConfig {
    std::optional<double> nu;
    std::optional<double> target_std;
    std::optional<double> target_gain;
    std::optional<double> distance;
    std::optional<double> segment;
    std::optional<double> attenuation;
    std::optional<double> h0;
    std::optional<std::vector<double>> schedule;
    std::optional<double> shrink;
    std::optional<double> slack;
    std::optional<std::size_t> max_iters;
    std::optional<std::size_t> degree_cap;
    std::optional<std::string> input;
    std::optional<std::string> output;

    /// Fields set in `overrides` replace ours.
    void merge(const RunConfig& overrides) {
        auto take = [](auto& dst, const auto& src) {
            if (src)
                dst = src;
        };
        take(nu, overrides.nu);
        take(target_std, overrides.target_std);
        take(target_gain, overrides.target_gain);
        take(distance, overrides.distance);
        take(segment, overrides.segment);
        take(attenuation, overrides.attenuation);
        take(h0, overrides.h0);
        take(schedule, overrides.schedule);
        take(shrink, overrides.shrink);
        take(slack, overrides.slack);
        take(max_iters, overrides.max_iters);
        take(degree_cap, overrides.degree_cap);
        take(input, overrides.input);
        take(output, overrides.output);
    }
};

namespace detail {

inline double config_number(std::string_view key, std::string_view value, std::size_t line) {
    const auto v = io::parse_double(value);
    if (!v)
        throw ParseError(line, "key '" + std::string(key) + "' expects a number, got '" +
                                   std::string(value) + "'");
    return *v;
}

inline std::size_t config_count(std::string_view key, std::string_view value, std::size_t line) {
    const double v = config_number(key, value, line);
    if (v < 0.0 || v != static_cast<double>(static_cast<std::size_t>(v)))
        throw ParseError(line, "key '" + std::string(key) + "' expects a non-negative integer");
    return static_cast<std::size_t>(v);
}

} // namespace detail

[[nodiscard]] inline std::vector<double> parse_number_list(std::string_view text, std::size_t line = 1) {
    std::vector<double> out;
    for (std::string_view cell : io::split(text, ',')) {
        const auto v = io::parse_double(cell);
        if (!v)
            throw ParseError(line, "bad list entry '" + std::string(io::trim(cell)) + "'");
        out.push_back(*v);
    }
    return out;
}

/// Applies one setting. Unknown keys are rejected.
inline void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value,
                             std::size_t line = 1) {
    using detail::config_count;
    using detail::config_number;
    if (key == "nu") cfg.nu = config_number(key, value, line);
    else if (key == "target_std") cfg.target_std = config_number(key, value, line);
    else if (key == "target_gain") cfg.target_gain = config_number(key, value, line);
    else if (key == "distance") cfg.distance = config_number(key, value, line);
    else if (key == "segment") cfg.segment = config_number(key, value, line);
    else if (key == "attenuation") cfg.attenuation = config_number(key, value, line);
    else if (key == "h0") cfg.h0 = config_number(key, value, line);
    else if (key == "schedule") cfg.schedule = parse_number_list(value, line);
    else if (key == "shrink") cfg.shrink = config_number(key, value, line);
    else if (key == "slack") cfg.slack = config_number(key, value, line);
    else if (key == "max_iters") cfg.max_iters = config_count(key, value, line);
    else if (key == "degree_cap") cfg.degree_cap = config_count(key, value, line);
    else if (key == "input") cfg.input = std::string(value);
    else if (key == "output") cfg.output = std::string(value);
    else throw ParseError(line, "unknown key '" + std::string(key) + "'");
}

/// Line-oriented key=value text with '#' comments.
[[nodiscard]] inline RunConfig parse_config_text(std::string_view text) {
    RunConfig cfg;
    std::size_t line_no = 0;
    for (std::string_view raw : io::split(text, '\n')) {
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos)
            raw = raw.substr(0, hash);
        const std::string_view line = io::trim(raw);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(line_no, "expected key=value");
        const auto key = io::trim(line.substr(0, eq));
        const auto value = io::trim(line.substr(eq + 1));
        set_config_value(cfg, key, value, line_no);
    }
    return cfg;
}

[[nodiscard]] inline RunConfig parse_config(const std::filesystem::path& path) {
    return parse_config_text(io::read_file(path));
}

/// Exactly one of target_gain or the distance/segment/attenuation triple.
[[nodiscard]] inline GainTarget gain_target(const RunConfig& cfg) {
    const bool any_link = cfg.distance || cfg.segment || cfg.attenuation;
    const bool full_link = cfg.distance && cfg.segment && cfg.attenuation;
    if (cfg.target_gain && any_link)
        throw ParseError(1, "give either target_gain or distance/segment/attenuation, not both");
    if (cfg.target_gain)
        return GainTarget::direct(*cfg.target_gain);
    if (!any_link)
        throw ParseError(1, "missing gain target: set target_gain or distance/segment/attenuation");
    if (!full_link)
        throw ParseError(1, "distance, segment and attenuation must all be set");
    return GainTarget::from_link(*cfg.distance, *cfg.segment, *cfg.attenuation);
}

[[nodiscard]] inline CalibrationOptions calibration_options(const RunConfig& cfg) {
    CalibrationOptions opt;
    if (cfg.schedule) opt.schedule = *cfg.schedule;
    if (cfg.h0) opt.h0 = *cfg.h0;
    if (cfg.shrink) opt.shrink = *cfg.shrink;
    if (cfg.slack) opt.slack = *cfg.slack;
    if (cfg.max_iters) opt.max_iters = *cfg.max_iters;
    return opt;
}

[[nodiscard]] inline PipelineConfig pipeline_config(const RunConfig& cfg) {
    if (!cfg.target_std)
        throw ParseError(1, "missing target_std");
    PipelineConfig pc;
    pc.nu = FractionalOrder(cfg.nu.value_or(0.5));
    pc.target_std = *cfg.target_std;
    pc.gain = gain_target(cfg);
    pc.calibration = calibration_options(cfg);
    pc.degree_cap = cfg.degree_cap.value_or(5);
    return pc;
}

} // namespace fodkit

#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "fodkit/dataset.hpp"
#include "fodkit/errors.hpp"

namespace fodkit::io {

[[nodiscard]] inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[nodiscard]] inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

/// Strict decimal parse; the whole cell must be consumed.
[[nodiscard]] inline std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (s.empty())
        return std::nullopt;
    if (s.front() == '+')
        s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
        return std::nullopt;
    return v;
}

/// Shortest representation that parses back to the same double.
[[nodiscard]] inline std::string format_number(double v) {
    if (v == 0.0)
        v = 0.0; // drop the sign of negative zero
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

[[nodiscard]] inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Writes through a temporary sibling and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(ErrorKind::io, "cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out)
            throw Error(ErrorKind::io, "short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw Error(ErrorKind::io, "cannot rename into " + path.string() + ": " + ec.message());
}

/// Comma-separated readings: a header row of sensor labels, then one row per measurement round.
[[nodiscard]] inline SensorDataset parse_dataset_text(std::string_view text) {
    if (text.starts_with("\xEF\xBB\xBF"))
        text.remove_prefix(3);

    std::vector<std::string_view> lines = split(text, '\n');
    std::size_t line_no = 0;
    std::size_t last_content = 1;
    std::vector<std::string> labels;
    std::vector<std::vector<double>> rows;

    for (std::string_view raw : lines) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (labels.empty()) {
            if (line.empty())
                throw ParseError(line_no, "missing header row");
            for (std::string_view cell : split(line, ',')) {
                const auto label = trim(cell);
                if (label.empty())
                    throw ParseError(line_no, "empty sensor label");
                labels.emplace_back(label);
            }
            if (labels.size() < 2)
                throw ParseError(line_no, "insufficient sensors: need at least 2 columns, got " +
                                              std::to_string(labels.size()));
            last_content = line_no;
            continue;
        }
        if (line.empty())
            continue;
        last_content = line_no;
        const auto cells = split(line, ',');
        if (cells.size() != labels.size())
            throw ParseError(line_no, "ragged row: " + std::to_string(cells.size()) +
                                          " cells, expected " + std::to_string(labels.size()));
        std::vector<double> row;
        row.reserve(cells.size());
        for (std::string_view cell : cells) {
            const auto v = parse_double(cell);
            if (!v)
                throw ParseError(line_no, "non-numeric cell '" + std::string(trim(cell)) + "'");
            if (*v < 0.0)
                throw ParseError(line_no, "negative reading " + std::string(trim(cell)));
            row.push_back(*v);
        }
        rows.push_back(std::move(row));
    }
    if (labels.empty())
        throw ParseError(1, "empty file");
    if (rows.size() < 2)
        throw ParseError(last_content, "insufficient readings: need at least 2 rows, got " +
                                      std::to_string(rows.size()));
    return SensorDataset(std::move(labels), std::move(rows));
}

[[nodiscard]] inline SensorDataset parse_dataset(const std::filesystem::path& path) {
    return parse_dataset_text(read_file(path));
}

[[nodiscard]] inline std::string write_dataset(const SensorDataset& dataset) {
    std::string out;
    for (std::size_t c = 0; c < dataset.sensors(); ++c) {
        if (c)
            out += ',';
        out += dataset.sensor_ids()[c];
    }
    out += '\n';
    for (const auto& row : dataset.rows()) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c)
                out += ',';
            out += format_number(row[c]);
        }
        out += '\n';
    }
    return out;
}

} // namespace fodkit::io

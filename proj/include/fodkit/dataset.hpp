#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "fodkit/errors.hpp"

namespace fodkit {

[[nodiscard]] inline double mean(std::span<const double> values) {
    if (values.empty())
        throw Error(ErrorKind::empty_input, "mean of empty sequence");
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

/// Divide-by-N standard deviation.
[[nodiscard]] inline double population_std(std::span<const double> values) {
    const double m = mean(values);
    double acc = 0.0;
    for (double v : values)
        acc += (v - m) * (v - m);
    return std::sqrt(acc / static_cast<double>(values.size()));
}

/// Repeated readings, one column per sensor and one row per measurement round.
class SensorDataset {
public:
    SensorDataset(std::vector<std::string> sensor_ids, std::vector<std::vector<double>> rows)
        : ids_(std::move(sensor_ids)), rows_(std::move(rows)) {
        if (ids_.size() < 2)
            throw Error(ErrorKind::insufficient_data,
                        "need at least 2 sensors, got " + std::to_string(ids_.size()));
        if (rows_.size() < 2)
            throw Error(ErrorKind::insufficient_data,
                        "need at least 2 readings per sensor, got " + std::to_string(rows_.size()));
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            if (rows_[r].size() != ids_.size())
                throw Error(ErrorKind::invalid_argument, "row " + std::to_string(r) + " has " +
                                                             std::to_string(rows_[r].size()) +
                                                             " readings, expected " +
                                                             std::to_string(ids_.size()));
            for (double v : rows_[r])
                if (!std::isfinite(v) || v < 0.0)
                    throw Error(ErrorKind::invalid_argument,
                                "readings must be finite and non-negative");
        }
    }

    [[nodiscard]] std::size_t sensors() const noexcept { return ids_.size(); }
    [[nodiscard]] std::size_t measurements() const noexcept { return rows_.size(); }
    [[nodiscard]] const std::vector<std::string>& sensor_ids() const noexcept { return ids_; }
    [[nodiscard]] const std::vector<std::vector<double>>& rows() const noexcept { return rows_; }
    [[nodiscard]] double at(std::size_t row, std::size_t sensor) const { return rows_.at(row).at(sensor); }

    [[nodiscard]] std::vector<double> column(std::size_t sensor) const {
        std::vector<double> out;
        out.reserve(rows_.size());
        for (const auto& row : rows_)
            out.push_back(row.at(sensor));
        return out;
    }

    friend bool operator==(const SensorDataset&, const SensorDataset&) = default;

private:
    std::vector<std::string> ids_;
    std::vector<std::vector<double>> rows_;
};

struct SensorStats {
    std::vector<double> means;  // per-sensor mean
    std::vector<double> stds;   // per-sensor population deviation (the impact parameter)
    double true_value = 0.0;    // mean of the per-sensor means
    double system_std = 0.0;    // population deviation of the per-sensor means

    [[nodiscard]] std::size_t sensors() const noexcept { return means.size(); }
};

[[nodiscard]] inline SensorStats sensor_stats(const SensorDataset& dataset) {
    SensorStats s;
    s.means.reserve(dataset.sensors());
    s.stds.reserve(dataset.sensors());
    for (std::size_t c = 0; c < dataset.sensors(); ++c) {
        const auto col = dataset.column(c);
        s.means.push_back(mean(col));
        s.stds.push_back(population_std(col));
    }
    s.true_value = mean(s.means);
    s.system_std = population_std(s.means);
    return s;
}

} // namespace fodkit

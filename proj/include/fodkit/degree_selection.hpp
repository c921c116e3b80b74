#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fodkit/errors.hpp"
#include "fodkit/polynomial.hpp"

namespace fodkit {

struct DegreeSelection {
    std::size_t chosen_degree = 0;
    /// Leave-one-out total absolute prediction error per candidate degree.
    std::map<std::size_t, double> total_error_by_degree;
    /// Candidates that could not be scored, with the reason.
    std::map<std::size_t, std::string> excluded;
};

/// Sum over i of |p_{-i}(x_i) - y_i|, where p_{-i} is the fit without point i.
/// In-sample residuals vanish once the degree reaches points - 1, so the
/// held-out form is the one that can prefer a low degree.
[[nodiscard]] inline double leave_one_out_error(std::span<const Point> points, std::size_t degree) {
    std::vector<Point> subset;
    subset.reserve(points.size());
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        subset.clear();
        for (std::size_t k = 0; k < points.size(); ++k)
            if (k != i)
                subset.push_back(points[k]);
        const PolynomialModel fit = polyfit(subset, degree);
        total += std::abs(fit(points[i].x) - points[i].y);
    }
    return total;
}

/// Scores degrees min_degree..max_degree and returns the argmin. Errors that agree
/// to within a relative 1e-9 of the data scale count as ties and go to the lower degree.
[[nodiscard]] inline DegreeSelection select_degree(std::span<const Point> points,
                                                   std::size_t max_degree,
                                                   std::size_t min_degree = 1) {
    if (points.size() < 3)
        throw Error(ErrorKind::insufficient_data, "degree selection needs at least 3 points");
    if (min_degree > max_degree)
        throw Error(ErrorKind::invalid_argument, "min_degree exceeds max_degree");
    if (max_degree >= points.size())
        throw Error(ErrorKind::underdetermined_fit, "max_degree must be below the point count");

    DegreeSelection out;
    for (std::size_t d = min_degree; d <= max_degree; ++d) {
        if (d + 2 > points.size()) {
            out.excluded[d] = "held-out fit needs " + std::to_string(d + 2) + " points";
            continue;
        }
        try {
            out.total_error_by_degree[d] = leave_one_out_error(points, d);
        } catch (const Error& e) {
            out.excluded[d] = e.what();
        }
    }
    if (out.total_error_by_degree.empty())
        throw Error(ErrorKind::singular_fit, "no candidate degree could be fitted");

    double scale = 0.0;
    for (const Point& p : points)
        scale += std::abs(p.y);
    const double tie = 1e-9 * std::max(scale, 1.0);

    double best = std::numeric_limits<double>::infinity();
    for (const auto& [d, err] : out.total_error_by_degree)
        best = std::min(best, err);
    for (const auto& [d, err] : out.total_error_by_degree) {
        if (err <= best + tie) {
            out.chosen_degree = d;
            break;
        }
    }
    return out;
}

} // namespace fodkit

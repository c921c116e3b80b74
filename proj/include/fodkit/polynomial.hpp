#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fodkit/errors.hpp"

namespace fodkit {

struct Point {
    double x;
    double y;
};

/// Polynomial a_0 + a_1 x + ... + a_d x^d over the impact-parameter range it was fitted on.
/// Evaluation outside [domain_lo, domain_hi] is plain analytic extrapolation.
class PolynomialModel {
public:
    PolynomialModel() : coefficients_{0.0} {}

    explicit PolynomialModel(std::vector<double> coefficients, double domain_lo = 0.0,
                             double domain_hi = 0.0)
        : coefficients_(std::move(coefficients)), domain_lo_(domain_lo), domain_hi_(domain_hi) {
        if (coefficients_.empty())
            throw Error(ErrorKind::invalid_argument, "polynomial needs at least one coefficient");
        for (double c : coefficients_)
            if (!std::isfinite(c))
                throw Error(ErrorKind::invalid_argument, "non-finite polynomial coefficient");
    }

    [[nodiscard]] std::size_t degree() const noexcept { return coefficients_.size() - 1; }
    [[nodiscard]] const std::vector<double>& coefficients() const noexcept { return coefficients_; }
    [[nodiscard]] double domain_lo() const noexcept { return domain_lo_; }
    [[nodiscard]] double domain_hi() const noexcept { return domain_hi_; }

    [[nodiscard]] double operator()(double x) const noexcept {
        double acc = 0.0;
        for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it)
            acc = acc * x + *it;
        return acc;
    }

    /// Coefficients b_k of the same polynomial written in powers of (x - center).
    [[nodiscard]] std::vector<double> taylor_coefficients(double center) const {
        // Repeated synthetic division by (x - center).
        std::vector<double> c = coefficients_;
        const std::size_t n = c.size();
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = n - 1; i > k; --i)
                c[i - 1] += center * c[i];
        return c;
    }

    PolynomialModel scaled(double factor) const {
        std::vector<double> c = coefficients_;
        for (double& v : c)
            v *= factor;
        return PolynomialModel(std::move(c), domain_lo_, domain_hi_);
    }

private:
    std::vector<double> coefficients_;
    double domain_lo_ = 0.0;
    double domain_hi_ = 0.0;
};

/// Ordinary least squares over the monomial basis, solved with a column-pivoted
/// Householder QR of the design matrix.
[[nodiscard]] inline PolynomialModel polyfit(std::span<const Point> points, std::size_t degree) {
    const std::size_t cols = degree + 1;
    if (points.size() < cols)
        throw Error(ErrorKind::underdetermined_fit,
                    "degree " + std::to_string(degree) + " needs at least " + std::to_string(cols) +
                        " points, got " + std::to_string(points.size()));

    const auto rows = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd design(rows, static_cast<Eigen::Index>(cols));
    Eigen::VectorXd rhs(rows);
    double lo = points.front().x;
    double hi = points.front().x;
    for (Eigen::Index r = 0; r < rows; ++r) {
        const Point& p = points[static_cast<std::size_t>(r)];
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw Error(ErrorKind::invalid_argument, "non-finite fit point");
        lo = std::min(lo, p.x);
        hi = std::max(hi, p.x);
        double power = 1.0;
        for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(cols); ++c) {
            design(r, c) = power;
            power *= p.x;
        }
        rhs(r) = p.y;
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < static_cast<Eigen::Index>(cols))
        throw Error(ErrorKind::singular_fit, "design matrix is rank deficient for degree " +
                                                 std::to_string(degree));
    const Eigen::VectorXd solution = qr.solve(rhs);

    std::vector<double> coefficients(cols);
    for (std::size_t c = 0; c < cols; ++c)
        coefficients[c] = solution(static_cast<Eigen::Index>(c));
    return PolynomialModel(std::move(coefficients), lo, hi);
}

[[nodiscard]] inline double sum_squared_residuals(const PolynomialModel& model,
                                                  std::span<const Point> points) {
    double acc = 0.0;
    for (const Point& p : points) {
        const double r = model(p.x) - p.y;
        acc += r * r;
    }
    return acc;
}

} // namespace fodkit

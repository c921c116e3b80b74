#pragma once

// Brute-force reference path used by verify_report. Shares no code with the
// production operator: weights come from the explicit product formula, the
// polynomial is evaluated term by term, and refits solve the normal equations.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace fodkit::direct {

/// (-1)^j C(nu, j) = (-1)^j nu (nu - 1) ... (nu - j + 1) / j!
[[nodiscard]] inline long double signed_binomial(long double nu, std::size_t j) {
    long double numerator = 1.0L;
    long double factorial = 1.0L;
    for (std::size_t k = 0; k < j; ++k) {
        numerator *= nu - static_cast<long double>(k);
        factorial *= static_cast<long double>(k + 1);
    }
    const long double sign = (j % 2 == 0) ? 1.0L : -1.0L;
    return sign * numerator / factorial;
}

[[nodiscard]] inline long double evaluate(std::span<const double> coefficients, long double x) {
    long double acc = 0.0L;
    for (std::size_t k = 0; k < coefficients.size(); ++k)
        acc += static_cast<long double>(coefficients[k]) * std::pow(x, static_cast<long double>(k));
    return acc;
}

[[nodiscard]] inline long double fractional_sum(std::span<const double> coefficients, double nu,
                                                double h, std::size_t terms, double x) {
    long double acc = 0.0L;
    for (std::size_t j = 0; j <= terms; ++j)
        acc += signed_binomial(nu, j) *
               evaluate(coefficients, static_cast<long double>(x) -
                                          static_cast<long double>(j) * static_cast<long double>(h));
    return std::pow(static_cast<long double>(h), -static_cast<long double>(nu)) * acc;
}

/// Least squares through the normal equations, Gauss-Jordan with partial pivoting.
[[nodiscard]] inline std::vector<double> normal_equation_fit(std::span<const double> xs,
                                                             std::span<const double> ys,
                                                             std::size_t degree) {
    const std::size_t n = degree + 1;
    std::vector<std::vector<long double>> a(n, std::vector<long double>(n + 1, 0.0L));
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t r = 0; r < n; ++r) {
            const long double xr = std::pow(static_cast<long double>(xs[i]), static_cast<long double>(r));
            for (std::size_t c = 0; c < n; ++c)
                a[r][c] += xr * std::pow(static_cast<long double>(xs[i]), static_cast<long double>(c));
            a[r][n] += xr * static_cast<long double>(ys[i]);
        }
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col]))
                pivot = r;
        std::swap(a[col], a[pivot]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col)
                continue;
            const long double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c <= n; ++c)
                a[r][c] -= f * a[col][c];
        }
    }
    std::vector<double> coefficients(n);
    for (std::size_t r = 0; r < n; ++r)
        coefficients[r] = static_cast<double>(a[r][n] / a[r][r]);
    return coefficients;
}

} // namespace fodkit::direct

#pragma once

// Grünwald–Letnikov differintegral over a finite memory window.
//
//   D^nu f(x) ~= h^(-nu) * sum_{j=0}^{n} w_j f(x - j h),   w_j = (-1)^j C(nu, j)
//
// with n = floor((b - a) / h) fixed by the window [a, b].

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fodkit/errors.hpp"
#include "fodkit/polynomial.hpp"

namespace fodkit {

/// Differintegral order, restricted to [0, 2].
class FractionalOrder {
public:
    static constexpr double min_value = 0.0;
    static constexpr double max_value = 2.0;

    explicit FractionalOrder(double nu) : nu_(nu) {
        if (!std::isfinite(nu) || nu < min_value || nu > max_value)
            throw Error(ErrorKind::invalid_order,
                        "order " + std::to_string(nu) + " outside supported range [0, 2]");
    }

    [[nodiscard]] double value() const noexcept { return nu_; }

    friend bool operator==(const FractionalOrder&, const FractionalOrder&) = default;

private:
    double nu_;
};

/// w_0..w_n by the multiplicative recurrence w_j = w_{j-1} (j - 1 - nu) / j.
[[nodiscard]] inline std::vector<double> gl_weights(FractionalOrder order, std::size_t n) {
    const double nu = order.value();
    std::vector<double> w(n + 1);
    w[0] = 1.0;
    for (std::size_t j = 1; j <= n; ++j) {
        const auto jd = static_cast<double>(j);
        w[j] = w[j - 1] * (jd - 1.0 - nu) / jd;
    }
    return w;
}

/// Term count for a window of the given length. The small guard absorbs
/// representation error in ratios such as 0.3 / 0.1.
[[nodiscard]] inline std::size_t term_count(double window_length, double h) {
    const double ratio = window_length / h;
    return static_cast<std::size_t>(std::floor(ratio + 1e-9 * std::max(1.0, ratio)));
}

inline constexpr std::size_t max_terms = 50'000'000;

/// Operator configuration with weights precomputed once.
class GlPlan {
public:
    /// Window-based plan: n = floor((b - a) / h).
    GlPlan(FractionalOrder order, double h, double window_lo, double window_hi)
        : order_(order), h_(h), lo_(window_lo), hi_(window_hi) {
        if (!std::isfinite(h) || h <= 0.0)
            throw Error(ErrorKind::invalid_argument, "step h must be positive and finite");
        if (!std::isfinite(window_lo) || !std::isfinite(window_hi) || !(window_lo < window_hi))
            throw Error(ErrorKind::degenerate_window, "window requires a < b");
        const double ratio = (window_hi - window_lo) / h;
        if (!(ratio <= static_cast<double>(max_terms)))
            throw Error(ErrorKind::invalid_argument,
                        "step " + std::to_string(h) + " needs more than " + std::to_string(max_terms) +
                            " weights for this window");
        n_ = term_count(window_hi - window_lo, h);
        weights_ = gl_weights(order_, n_);
        scale_ = std::pow(h_, -order_.value());
    }

    /// Plan over a sampled sequence of `samples` points spaced h apart.
    [[nodiscard]] static GlPlan for_sequence(FractionalOrder order, double h, std::size_t samples) {
        if (samples < 2)
            return GlPlan(order, h, 0.0, h); // n = 1, one-step memory
        return GlPlan(order, h, 0.0, h * static_cast<double>(samples - 1));
    }

    [[nodiscard]] FractionalOrder order() const noexcept { return order_; }
    [[nodiscard]] double nu() const noexcept { return order_.value(); }
    [[nodiscard]] double h() const noexcept { return h_; }
    [[nodiscard]] double window_lo() const noexcept { return lo_; }
    [[nodiscard]] double window_hi() const noexcept { return hi_; }
    [[nodiscard]] std::size_t terms() const noexcept { return n_; }
    [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }
    /// h^(-nu)
    [[nodiscard]] double scale() const noexcept { return scale_; }

private:
    FractionalOrder order_;
    double h_;
    double lo_;
    double hi_;
    std::size_t n_ = 0;
    std::vector<double> weights_;
    double scale_ = 1.0;
};

template <typename F>
concept ScalarFunction = std::regular_invocable<const F&, double> &&
                         std::convertible_to<std::invoke_result_t<const F&, double>, double>;

/// h^(-nu) * sum_j w_j model(x - j h). Arguments below the window are evaluated
/// directly, i.e. a polynomial model is extrapolated analytically.
template <ScalarFunction Model>
[[nodiscard]] double gl_apply_model(const Model& model, const GlPlan& plan, double x) {
    const auto& w = plan.weights();
    const double h = plan.h();
    double acc = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j)
        acc += w[j] * static_cast<double>(model(x - static_cast<double>(j) * h));
    return plan.scale() * acc;
}

/// How samples before the first one are synthesised.
struct BoundaryExtension {
    enum class Kind { hold, zero, refit };

    Kind kind = Kind::hold;
    std::size_t refit_degree = 1;

    static BoundaryExtension hold() { return {Kind::hold, 0}; }
    static BoundaryExtension zero() { return {Kind::zero, 0}; }
    static BoundaryExtension refit(std::size_t degree) { return {Kind::refit, degree}; }
};

/// Sampled form of the operator on a uniform grid of spacing plan.h().
[[nodiscard]] inline std::vector<double>
gl_apply_sequence(std::span<const double> values, const GlPlan& plan,
                  BoundaryExtension boundary = BoundaryExtension::hold()) {
    if (values.empty())
        throw Error(ErrorKind::empty_input, "gl_apply_sequence needs at least one value");

    std::optional<PolynomialModel> extension;
    if (boundary.kind == BoundaryExtension::Kind::refit) {
        std::vector<Point> pts;
        pts.reserve(values.size());
        for (std::size_t i = 0; i < values.size(); ++i)
            pts.push_back({static_cast<double>(i), values[i]});
        const std::size_t degree = std::min(boundary.refit_degree, values.size() - 1);
        extension = polyfit(pts, degree); // grid index units
    }

    const auto& w = plan.weights();
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) {
            double v;
            if (j <= i) {
                v = values[i - j];
            } else {
                switch (boundary.kind) {
                case BoundaryExtension::Kind::hold: v = values.front(); break;
                case BoundaryExtension::Kind::zero: v = 0.0; break;
                case BoundaryExtension::Kind::refit:
                    v = (*extension)(static_cast<double>(i) - static_cast<double>(j));
                    break;
                }
            }
            acc += w[j] * v;
        }
        out[i] = plan.scale() * acc;
    }
    return out;
}

struct SpectralPoint {
    double omega;
    double amplitude;
    double phase;
};

/// Characteristic function (i omega)^nu split into |omega|^nu and (pi nu / 2) sgn(omega).
[[nodiscard]] inline std::vector<SpectralPoint> spectral_response(FractionalOrder order,
                                                                  std::span<const double> omegas) {
    const double nu = order.value();
    std::vector<SpectralPoint> out;
    out.reserve(omegas.size());
    for (double omega : omegas) {
        if (!std::isfinite(omega))
            throw Error(ErrorKind::invalid_argument, "non-finite frequency");
        const double sign = omega > 0.0 ? 1.0 : (omega < 0.0 ? -1.0 : 0.0);
        const double amplitude = (omega == 0.0) ? (nu == 0.0 ? 1.0 : 0.0) : std::pow(std::abs(omega), nu);
        out.push_back({omega, amplitude, std::numbers::pi * nu / 2.0 * sign});
    }
    return out;
}

/// Exact h -> 0 limit of gl_apply_model for a polynomial with memory length L:
/// the differintegral with lower terminal x - L,
///   sum_k b_k k! / Gamma(k + 1 - nu) L^(k - nu),  b_k the Taylor coefficients at x - L.
[[nodiscard]] inline double gl_limit_polynomial(const PolynomialModel& model, FractionalOrder order,
                                                double memory_length, double x) {
    const double nu = order.value();
    const std::vector<double> b = model.taylor_coefficients(x - memory_length);
    double acc = 0.0;
    double factorial = 1.0;
    for (std::size_t k = 0; k < b.size(); ++k) {
        if (k > 0)
            factorial *= static_cast<double>(k);
        const double shifted = static_cast<double>(k) + 1.0 - nu;
        // 1/Gamma vanishes at non-positive integers (integer orders above the degree).
        if (shifted <= 0.0 && shifted == std::floor(shifted))
            continue;
        acc += b[k] * factorial / std::tgamma(shifted) * std::pow(memory_length, static_cast<double>(k) - nu);
    }
    return acc;
}

} // namespace fodkit

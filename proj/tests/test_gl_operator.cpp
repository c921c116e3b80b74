#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "fodkit/gl_operator.hpp"
#include "oracle.hpp"

using namespace fodkit;

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace

TEST(GlWeights, IntegerOrdersCollapse) {
    EXPECT_EQ(gl_weights(FractionalOrder(1.0), 3), (std::vector<double>{1, -1, 0, 0}));
    EXPECT_EQ(gl_weights(FractionalOrder(0.0), 2), (std::vector<double>{1, 0, 0}));
    EXPECT_EQ(gl_weights(FractionalOrder(2.0), 3), (std::vector<double>{1, -2, 1, 0}));
}

TEST(GlWeights, HalfOrderHandValues) {
    const auto w = gl_weights(FractionalOrder(0.5), 4);
    const std::vector<double> expected{1, -0.5, -0.125, -0.0625, -0.0390625};
    ASSERT_EQ(w.size(), expected.size());
    for (std::size_t j = 0; j < w.size(); ++j)
        EXPECT_DOUBLE_EQ(w[j], expected[j]);
}

TEST(GlWeights, RejectsUnsupportedOrders) {
    EXPECT_THROW(FractionalOrder(-0.1), Error);
    EXPECT_THROW(FractionalOrder(2.5), Error);
    EXPECT_THROW(FractionalOrder(std::nan("")), Error);
    try {
        FractionalOrder bad(3.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::invalid_order);
    }
}

TEST(GlWeights, RecurrenceMatchesProductFormula) {
    for (double nu : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0, 1.3, 1.5, 2.0}) {
        const auto w = gl_weights(FractionalOrder(nu), 50);
        for (std::size_t j = 0; j <= 50; ++j) {
            const double ref = static_cast<double>(oracle::weight(nu, j));
            if (ref == 0.0)
                EXPECT_NEAR(w[j], 0.0, 1e-300) << "nu=" << nu << " j=" << j;
            else
                EXPECT_LE(rel_err(w[j], ref), 1e-12) << "nu=" << nu << " j=" << j;
        }
    }
}

TEST(GlWeights, PartialSumIdentity) {
    // sum_{j<=n} (-1)^j C(nu, j) = (-1)^n C(nu - 1, n)
    for (double nu : {0.2, 0.5, 0.8, 1.5}) {
        const auto w = gl_weights(FractionalOrder(nu), 50);
        double partial = 0.0;
        for (std::size_t n = 0; n <= 50; ++n) {
            partial += w[n];
            const double ref = static_cast<double>(((n % 2) ? -1.0L : 1.0L) * oracle::binomial(nu - 1.0, n));
            EXPECT_LE(rel_err(partial, ref), 1e-12) << "nu=" << nu << " n=" << n;
        }
    }
}

TEST(GlWeights, SignAndMonotonePartialSumsBelowOne) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(0.01, 0.99);
    for (int trial = 0; trial < 50; ++trial) {
        const double nu = dist(rng);
        const auto w = gl_weights(FractionalOrder(nu), 200);
        double partial = w[0];
        for (std::size_t j = 1; j < w.size(); ++j) {
            EXPECT_LT(w[j], 0.0);
            const double next = partial + w[j];
            EXPECT_GT(next, 0.0);
            EXPECT_LE(next, partial);
            partial = next;
        }
    }
}

TEST(GlPlan, TermCountUsesFloor) {
    const GlPlan p(FractionalOrder(0.5), 0.01, 0.07, 0.26);
    EXPECT_EQ(p.terms(), 19u);
    EXPECT_EQ(p.weights().size(), 20u);
    EXPECT_EQ(GlPlan(FractionalOrder(0.5), 0.003, 0.07, 0.26).terms(), 63u);
    EXPECT_EQ(GlPlan(FractionalOrder(0.5), 0.1, 0.0, 0.3).terms(), 3u);
    EXPECT_EQ(GlPlan(FractionalOrder(0.5), 0.04, 0.0, 0.1).terms(), 2u);
}

TEST(GlPlan, RejectsBadWindowAndStep) {
    EXPECT_THROW(GlPlan(FractionalOrder(0.5), 0.01, 0.3, 0.3), Error);
    EXPECT_THROW(GlPlan(FractionalOrder(0.5), 0.0, 0.0, 1.0), Error);
    EXPECT_THROW(GlPlan(FractionalOrder(0.5), -0.1, 0.0, 1.0), Error);
}

TEST(GlApplyModel, IdentityOrder) {
    const PolynomialModel m({1.5, -2.0, 0.75});
    const GlPlan plan(FractionalOrder(0.0), 0.01, 0.0, 1.0);
    for (double x : {-1.0, 0.0, 0.3, 2.5})
        EXPECT_EQ(gl_apply_model(m, plan, x), m(x));
}

TEST(GlApplyModel, FirstOrderIsBackwardDifference) {
    const PolynomialModel id({0.0, 1.0});
    const GlPlan plan(FractionalOrder(1.0), 0.01, 0.0, 1.0);
    EXPECT_NEAR(gl_apply_model(id, plan, 1.0), 1.0, 1e-12);

    const PolynomialModel q({0.3, -1.0, 2.0});
    for (double x : {0.2, 0.7, 1.4}) {
        const double h = plan.h();
        EXPECT_NEAR(gl_apply_model(q, plan, x), (q(x) - q(x - h)) / h, 1e-10);
    }
}

TEST(GlApplyModel, HalfDerivativeOfIdentityConverges) {
    const PolynomialModel id({0.0, 1.0});
    const double exact = 2.0 / std::sqrt(std::numbers::pi);
    double previous = 1.0;
    for (double h : {1e-2, 1e-3, 1e-4}) {
        const GlPlan plan(FractionalOrder(0.5), h, 0.0, 1.0);
        const double err = std::abs(gl_apply_model(id, plan, 1.0) - exact);
        EXPECT_LT(err, previous);
        previous = err;
    }
    EXPECT_LT(previous, 1e-3);
}

TEST(GlApplyModel, PowerFunctionConvergence) {
    // Gamma(p+1)/Gamma(p+1-nu) x^(p-nu) with lower terminal 0.
    for (int p : {1, 2}) {
        for (double nu : {0.3, 0.5, 0.8}) {
            std::vector<double> c(p + 1, 0.0);
            c[p] = 1.0;
            const PolynomialModel m(c);
            const double x = 0.8;
            const double exact = std::tgamma(p + 1.0) / std::tgamma(p + 1.0 - nu) * std::pow(x, p - nu);
            const double e1 = std::abs(gl_apply_model(m, GlPlan(FractionalOrder(nu), 1e-2, 0.0, x), x) - exact);
            const double e2 = std::abs(gl_apply_model(m, GlPlan(FractionalOrder(nu), 1e-3, 0.0, x), x) - exact);
            EXPECT_GT(e1, e2) << "p=" << p << " nu=" << nu;
            EXPECT_NEAR(gl_limit_polynomial(m, FractionalOrder(nu), x, x), exact, 1e-12);
        }
    }
}

TEST(GlApplyModel, Linearity) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<double> f(4), g(4), combo(4);
        const double alpha = coef(rng), beta = coef(rng);
        for (int k = 0; k < 4; ++k) {
            f[k] = coef(rng);
            g[k] = coef(rng);
            combo[k] = alpha * f[k] + beta * g[k];
        }
        const GlPlan plan(FractionalOrder(0.5), 0.01, 0.2, 0.5);
        const double x = 0.45;
        const double lhs = gl_apply_model(PolynomialModel(combo), plan, x);
        const double rhs = alpha * gl_apply_model(PolynomialModel(f), plan, x) +
                           beta * gl_apply_model(PolynomialModel(g), plan, x);
        EXPECT_NEAR(lhs, rhs, 1e-9 * std::max(1.0, std::abs(rhs)));
    }
}

TEST(GlApplySequence, IdentityAndFirstDifference) {
    const std::vector<double> v{3, 5, 7};
    EXPECT_EQ(gl_apply_sequence(v, GlPlan::for_sequence(FractionalOrder(0.0), 1.0, v.size())), v);

    const std::vector<double> ramp{0, 1, 2, 3};
    const auto d = gl_apply_sequence(ramp, GlPlan::for_sequence(FractionalOrder(1.0), 1.0, ramp.size()));
    EXPECT_EQ(d, (std::vector<double>{0, 1, 1, 1}));
}

TEST(GlApplySequence, ConstantInputMatchesDirectSummation) {
    const double c = 2.5;
    const double h = 0.25;
    const std::vector<double> v(5, c);
    const GlPlan plan = GlPlan::for_sequence(FractionalOrder(0.5), h, v.size());
    ASSERT_EQ(plan.terms(), 4u);

    // Held boundary: every output sees n + 1 copies of c.
    const auto held = gl_apply_sequence(v, plan);
    long double wsum = 0.0L;
    for (std::size_t j = 0; j <= 4; ++j)
        wsum += oracle::weight(0.5, j);
    for (double out : held)
        EXPECT_NEAR(out, static_cast<double>(c * std::pow(h, -0.5) * wsum), 1e-12);

    // Zero boundary truncates to the partial sum up to the sample index.
    const auto trunc = gl_apply_sequence(v, plan, BoundaryExtension::zero());
    for (std::size_t i = 0; i < v.size(); ++i) {
        long double partial = 0.0L;
        for (std::size_t j = 0; j <= i; ++j)
            partial += oracle::weight(0.5, j);
        EXPECT_NEAR(trunc[i], static_cast<double>(c * std::pow(h, -0.5) * partial), 1e-12);
    }
}

TEST(GlApplySequence, PositiveConstantStaysPositive) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> nu_dist(0.05, 0.95);
    for (int trial = 0; trial < 30; ++trial) {
        const std::vector<double> v(12, 4.0);
        const auto out = gl_apply_sequence(v, GlPlan::for_sequence(FractionalOrder(nu_dist(rng)), 0.1, v.size()));
        for (double o : out)
            EXPECT_GT(o, 0.0);
    }
}

TEST(GlApplySequence, RefitExtensionFollowsLinearTrend) {
    // A line extended by a linear refit is still a line, so the first
    // difference is the slope everywhere, including the left edge.
    const std::vector<double> v{1.0, 3.0, 5.0, 7.0, 9.0};
    const auto d = gl_apply_sequence(v, GlPlan::for_sequence(FractionalOrder(1.0), 1.0, v.size()),
                                     BoundaryExtension::refit(1));
    for (double o : d)
        EXPECT_NEAR(o, 2.0, 1e-12);
}

TEST(GlApplySequence, EmptyInputRejected) {
    const std::vector<double> empty;
    try {
        (void)gl_apply_sequence(empty, GlPlan::for_sequence(FractionalOrder(0.5), 1.0, 1));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::empty_input);
    }
}

TEST(SpectralResponse, Examples) {
    const std::vector<double> w{5.0};
    auto p = spectral_response(FractionalOrder(0.0), w);
    EXPECT_DOUBLE_EQ(p[0].amplitude, 1.0);
    EXPECT_DOUBLE_EQ(p[0].phase, 0.0);

    const std::vector<double> two{2.0};
    p = spectral_response(FractionalOrder(1.0), two);
    EXPECT_DOUBLE_EQ(p[0].amplitude, 2.0);
    EXPECT_DOUBLE_EQ(p[0].phase, std::numbers::pi / 2);

    const std::vector<double> four{4.0};
    p = spectral_response(FractionalOrder(0.5), four);
    EXPECT_DOUBLE_EQ(p[0].amplitude, 2.0);
    EXPECT_DOUBLE_EQ(p[0].phase, std::numbers::pi / 4);
}

TEST(SpectralResponse, ZeroAndNegativeFrequency) {
    const std::vector<double> w{0.0, -9.0};
    auto p = spectral_response(FractionalOrder(0.5), w);
    EXPECT_EQ(p[0].amplitude, 0.0);
    EXPECT_EQ(p[0].phase, 0.0);
    EXPECT_DOUBLE_EQ(p[1].amplitude, 3.0);
    EXPECT_DOUBLE_EQ(p[1].phase, -std::numbers::pi / 4);

    p = spectral_response(FractionalOrder(0.0), std::vector<double>{0.0});
    EXPECT_EQ(p[0].amplitude, 1.0);
}

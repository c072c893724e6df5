#include <gtest/gtest.h>

#include "spps/grid.hpp"

using namespace spps;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an spps::Error";
    return ErrorCode::invalid_argument;
}

} // namespace

TEST(Grid, UniformNodesAndAnchor) {
    auto g = make_grid(0, 1, 10, 0);
    EXPECT_EQ(g.x0_index, 0);
    for (int i = 0; i <= 10; ++i) EXPECT_NEAR(g.node(i), 0.1 * i, 1e-15);
    EXPECT_EQ(g.node(10), 1.0);
}

TEST(Grid, AnchorSnapsToNode) {
    auto g = make_grid(-1, 1, 16, 0.5);
    EXPECT_EQ(g.x0_index, 12);
    EXPECT_EQ(g.snap_distance, 0.0);
    auto h = make_grid(0, 1, 10, 0.33);
    EXPECT_EQ(h.x0_index, 3);
    EXPECT_NEAR(h.snap_distance, 0.03, 1e-12);
}

TEST(Grid, MathieuGridSize) {
    auto g = make_grid(0, M_PI, 7000, 0);
    EXPECT_EQ(g.size(), 7001);
    EXPECT_DOUBLE_EQ(g.node(7000), M_PI);
}

TEST(Grid, RejectsBadInput) {
    EXPECT_EQ(code_of([] { make_grid(1, 1, 10, 1); }), ErrorCode::invalid_interval);
    EXPECT_EQ(code_of([] { make_grid(2, 1, 10, 1.5); }), ErrorCode::invalid_interval);
    EXPECT_EQ(code_of([] { make_grid(0, 1, 7, 0); }), ErrorCode::grid_too_coarse);
}

TEST(Sample, ValuesAndNonfinite) {
    auto g = make_grid(0, M_PI, 100, 0);
    auto q = sample(g, [](double x) { return 2 * std::cos(2 * x); });
    EXPECT_DOUBLE_EQ(q[0].real(), 2.0);
    auto s = sample(make_grid(-1, 1, 20, 0), [](double x) { return -12 / std::pow(std::cosh(x), 2); });
    EXPECT_DOUBLE_EQ(s[10].real(), -12.0);
    try {
        sample(make_grid(0, 1, 10, 0), [](double x) { return 1.0 / (x - 0.5); });
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::nonfinite_sample);
        EXPECT_EQ(e.index(), 5);
    }
}

TEST(Pointwise, Algebra) {
    auto g = make_grid(0, 1, 10, 0);
    auto one = constant(g, 1.0);
    auto x = sample(g, [](double t) { return t; });
    auto r = pointwise(PointwiseOp::reciprocal, one);
    for (auto v : r.values) EXPECT_EQ(v, cplx(1.0));
    auto sq = pointwise(PointwiseOp::multiply, x, &x);
    for (int i = 0; i <= 10; ++i) EXPECT_NEAR(sq[i].real(), g.node(i) * g.node(i), 1e-15);
    auto sc = pointwise(PointwiseOp::scale, x, nullptr, cplx(0, 2));
    EXPECT_EQ(sc[10], cplx(0, 2));
    try {
        divide(one, x);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::division_by_zero);
        EXPECT_EQ(e.index(), 0);
    }
    auto other = constant(make_grid(0, 2, 10, 0), 1.0);
    EXPECT_EQ(code_of([&] { add(one, other); }), ErrorCode::grid_mismatch);
}

TEST(CumulativeIntegral, ConstantAndCubicExact) {
    auto g = make_grid(0, 1, 10, 0);
    auto F = cumulative_integral(constant(g, 1.0));
    for (int i = 0; i <= 10; ++i) EXPECT_NEAR(F[i].real(), g.node(i), 1e-15);
    auto c = cumulative_integral(sample(g, [](double x) { return x * x * x; }));
    EXPECT_NEAR(c.back().real(), 0.25, 1e-15);
    for (int i = 0; i <= 10; ++i) EXPECT_NEAR(c[i].real(), std::pow(g.node(i), 4) / 4, 1e-15);
}

TEST(CumulativeIntegral, AnyCubicFromInteriorAnchor) {
    auto g = make_grid(-1, 2, 12, 0.5);
    auto f = sample(g, [](double x) { return cplx(1 - 2 * x + 3 * x * x * x, x * x); });
    auto F = cumulative_integral(f);
    auto P = [](double x) { return cplx(x - x * x + 0.75 * x * x * x * x, x * x * x / 3); };
    EXPECT_EQ(F.at_anchor(), cplx(0.0));
    for (int i = 0; i <= g.m; ++i) EXPECT_LT(std::abs(F[i] - (P(g.node(i)) - P(0.5))), 1e-14);
}

TEST(CumulativeIntegral, CosineOnMathieuGrid) {
    auto g = make_grid(0, M_PI, 7000, 0);
    auto F = cumulative_integral(sample(g, [](double x) { return std::cos(x); }));
    EXPECT_LT(std::abs(F.back()), 1e-12);
    double worst = 0;
    for (int i = 0; i <= g.m; ++i) worst = std::max(worst, std::abs(F[i].real() - std::sin(g.node(i))));
    EXPECT_LT(worst, 1e-12);
}

TEST(CumulativeIntegral, Linearity) {
    auto g = make_grid(0, 2, 64, 0.5);
    auto f = sample(g, [](double x) { return std::exp(x); });
    auto h = sample(g, [](double x) { return std::sin(3 * x); });
    const cplx a(2, -1), b(0.5, 3);
    auto lhs = cumulative_integral(add(scale(f, a), scale(h, b)));
    auto rhs = add(scale(cumulative_integral(f), a), scale(cumulative_integral(h), b));
    for (int i = 0; i <= g.m; ++i) EXPECT_LT(std::abs(lhs[i] - rhs[i]), 1e-13);
}

TEST(CumulativeIntegral, FourthOrderConvergence) {
    auto err = [](int m) {
        auto g = make_grid(0, 1, m, 0);
        auto F = cumulative_integral(sample(g, [](double x) { return std::exp(x); }));
        double w = 0;
        for (int i = 0; i <= m; ++i) w = std::max(w, std::abs(F[i].real() - (std::exp(g.node(i)) - 1)));
        return w;
    };
    const double ratio = err(40) / err(80);
    EXPECT_GE(ratio, 12.0);
    EXPECT_LE(ratio, 20.0);
}

TEST(CumulativeIntegral, SimpsonCrossCheck) {
    auto g = make_grid(0, 1, 200, 0);
    auto f = sample(g, [](double x) { return std::exp(-x * x); });
    auto a = cumulative_integral(f, Quadrature::spline);
    auto b = cumulative_integral(f, Quadrature::simpson);
    for (int i = 0; i <= g.m; ++i) EXPECT_LT(std::abs(a[i] - b[i]), 1e-9);
    EXPECT_NEAR(b.back().real(), std::sqrt(M_PI) / 2 * std::erf(1.0), 1e-10);
}

TEST(SplineDerivative, ReproducesCubics) {
    auto g = make_grid(0, 1, 20, 0);
    auto f = sample(g, [](double x) { return x * x * x - x; });
    auto d1 = spline_derivative(f, 1);
    auto d2 = spline_derivative(f, 2);
    for (int i = 0; i <= g.m; ++i) {
        double x = g.node(i);
        EXPECT_NEAR(d1[i].real(), 3 * x * x - 1, 1e-12);
        EXPECT_NEAR(d2[i].real(), 6 * x, 1e-10);
    }
    EXPECT_NEAR(interpolate(f, 0.537).real(), std::pow(0.537, 3) - 0.537, 1e-14);
}

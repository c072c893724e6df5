#include <gtest/gtest.h>

#include "spps/formal_powers.hpp"

using namespace spps;

namespace {

FormalPowerFamily unit_family(FamilyKind kind, int m, int N) {
    auto g = make_grid(0, 1, m, 0);
    return build_family(kind, {constant(g, 1.0), constant(g, 1.0)}, N);
}

double factorial_power(double x, int n) { return std::exp(n * std::log(x) - std::lgamma(n + 1.0)); }

} // namespace

TEST(FormalPowers, ZerothMemberIsOne) {
    auto g = make_grid(0, 1, 50, 0.3);
    auto fam = build_family(FamilyKind::X, {sample(g, [](double x) { return 1 + x; }), constant(g, 2.0)}, 4);
    for (auto v : fam.members[0].values) EXPECT_EQ(v, cplx(1.0));
}

TEST(FormalPowers, UnitWeightsGiveFactorials) {
    auto xt = unit_family(FamilyKind::Xtilde, 1000, 60);
    auto x = unit_family(FamilyKind::X, 1000, 60);
    const Grid& g = xt.grid();
    double worst = 0;
    for (int n = 1; n <= 60; ++n)
        for (int i = 1; i <= g.m; i += 37) {
            double ref = factorial_power(g.node(i), n);
            worst = std::max({worst, std::abs(xt.members[n][i] - ref), std::abs(x.members[n][i] - ref)});
        }
    EXPECT_LT(worst, 1e-12);
}

TEST(FormalPowers, AnchorVanishes) {
    auto g = make_grid(-1, 1, 80, 0.25);
    WeightPair w{sample(g, [](double x) { return std::exp(x); }), sample(g, [](double x) { return 2 + std::sin(x); })};
    for (auto kind : {FamilyKind::X, FamilyKind::Xtilde, FamilyKind::Y, FamilyKind::Ytilde}) {
        auto fam = build_family(kind, w, 10);
        for (int n = 1; n <= 10; ++n) EXPECT_EQ(fam.members[n].at_anchor(), cplx(0.0));
    }
}

TEST(FormalPowers, WeightAlternation) {
    auto g = make_grid(0, 1, 400, 0);
    WeightPair w{constant(g, 2.0), constant(g, 3.0)};
    auto xt = build_family(FamilyKind::Xtilde, w, 3);
    auto x = build_family(FamilyKind::X, w, 3);
    // Xtilde: 2x, 3x^2, 2x^3; X: 3x, 3x^2, 3x^3.
    EXPECT_NEAR(xt.members[1].back().real(), 2.0, 1e-14);
    EXPECT_NEAR(xt.members[2].back().real(), 3.0, 1e-14);
    EXPECT_NEAR(x.members[1].back().real(), 3.0, 1e-14);
    EXPECT_NEAR(x.members[2].back().real(), 3.0, 1e-14);
    EXPECT_NEAR(xt.members[3].back().real(), 2.0, 1e-14);
    EXPECT_NEAR(x.members[3].back().real(), 3.0, 1e-14);
}

TEST(FormalPowers, GrowthEstimateHolds) {
    auto g = make_grid(0, 2, 600, 0);
    WeightPair w{sample(g, [](double x) { return 1 + 0.5 * std::cos(3 * x); }),
                 sample(g, [](double x) { return 1 / (1.2 + std::sin(x)); })};
    auto xt = build_family(FamilyKind::Xtilde, w, 40);
    auto x = build_family(FamilyKind::X, w, 41);
    for (int k = 1; 2 * k <= 40; ++k) EXPECT_LE(xt.members[2 * k].max_abs(), even_member_bound(w, k) * (1 + 1e-10));
    for (int k = 0; 2 * k + 1 <= 41; ++k)
        EXPECT_LE(x.members[2 * k + 1].max_abs(), odd_member_bound(w, k) * (1 + 1e-10));
}

TEST(FormalPowers, DerivativeRecoversRecursion) {
    auto g = make_grid(0, 1, 800, 0);
    WeightPair w{sample(g, [](double x) { return 1 + x * x; }), sample(g, [](double x) { return std::exp(-x); })};
    auto fam = build_family(FamilyKind::Xtilde, w, 6);
    const double h = g.h();
    for (int n = 1; n <= 6; ++n) {
        const auto& wt = fam.weight_for(n);
        double worst = 0;
        for (int i = 1; i < g.m; ++i) {
            cplx d = (fam.members[n][i + 1] - fam.members[n][i - 1]) / (2 * h);
            worst = std::max(worst, std::abs(d - fam.members[n - 1][i] * wt[i]));
        }
        EXPECT_LT(worst, 10 * h * h);
    }
}

TEST(EvaluateSeries, ClosedForms) {
    auto xt = unit_family(FamilyKind::Xtilde, 1000, 60);
    const int end = xt.grid().m;
    EXPECT_NEAR(evaluate_series(xt, Parity::even, 0, 1.0, end).value.real(), std::cosh(1.0), 1e-13);
    EXPECT_NEAR(evaluate_series(xt, Parity::even, 0, -1.0, end).value.real(), std::cos(1.0), 1e-13);
    EXPECT_NEAR(evaluate_series(xt, Parity::odd, 1, -1.0, end).value.real(), std::sin(1.0), 1e-13);
    auto zero = evaluate_series(xt, Parity::even, 2, 0.0, end);
    EXPECT_EQ(zero.value, xt.members[2][end]);
    EXPECT_LT(evaluate_series(xt, Parity::even, 0, 1.0, end).tail, 1e-60);
}

TEST(EvaluateSeries, Errors) {
    auto xt = unit_family(FamilyKind::Xtilde, 100, 4);
    EXPECT_THROW(evaluate_series(xt, Parity::even, 1, 1.0, 0), Error);
    try {
        evaluate_strided(xt, 6, 2, 1.0, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::insufficient_order);
    }
}

TEST(EvaluateSeries, ProfileMatchesPointwise) {
    auto xt = unit_family(FamilyKind::Xtilde, 200, 40);
    auto [prof, tail] = evaluate_profile(xt, 0, 2, cplx(0.3, 1.2));
    for (int i = 0; i <= 200; i += 20)
        EXPECT_LT(std::abs(prof[i] - evaluate_strided(xt, 0, 2, cplx(0.3, 1.2), i).value), 1e-15);
    EXPECT_LT(tail, 1e-30);
}

TEST(SuggestOrder, FindsTruncation) {
    auto xt = unit_family(FamilyKind::Xtilde, 100, 120);
    int k = suggest_order(xt, 0, 25.0);
    EXPECT_GT(k, 5);
    EXPECT_LT(k, 60);
    EXPECT_EQ(suggest_order(unit_family(FamilyKind::Xtilde, 100, 4), 0, 1e6), -1);
}

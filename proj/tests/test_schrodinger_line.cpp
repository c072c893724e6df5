#include <gtest/gtest.h>

#include "oracles.hpp"
#include "spps/schrodinger_line.hpp"

using namespace spps;

namespace {

WellPotential step_well(double a1, double a2, double depth, double h, int m) {
    return make_well(a1, a2, constant(make_grid(0, h, m, 0), depth));
}

} // namespace

TEST(Well, SquareWellSymmetric) {
    // Depth V0 = 10, width 1: even states solve k tan(k/2) = kappa, odd ones -k cot(k/2) = kappa.
    auto w = step_well(0, 0, -10, 1, 2000);
    auto s = solve_well(w, 100);
    auto ref = oracle::well_eigenvalues(0, 0, [](double) { return -10.0; }, 1, -10 + 1e-9);
    ASSERT_EQ(s.eigenvalues.size(), ref.size());
    for (size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(s.eigenvalues[i], ref[i], 1e-9);
}

TEST(Well, StepWithRaisedRightSide) {
    auto s = solve_well(step_well(0, 5, -10, 1, 2000), 100);
    ASSERT_FALSE(s.eigenvalues.empty());
    EXPECT_NEAR(s.eigenvalues[0], -6.1986718089, 1e-9);
}

TEST(Well, AsymmetricStepAgainstShooting) {
    auto q = [](double x) { return -8.0 + 3.0 * x; };
    auto w = make_well(0, 5, sample(make_grid(0, 2, 2000, 0), q));
    auto s = solve_well(w, 100);
    auto ref = oracle::well_eigenvalues(0, 5, q, 2, -8 + 1e-9);
    ASSERT_EQ(s.eigenvalues.size(), ref.size());
    for (size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(s.eigenvalues[i], ref[i], 1e-8);
}

TEST(Well, NoBoundStateForBarrier) {
    auto w = step_well(0, 0, 2, 1, 200);
    auto s = solve_well(w, 40);
    EXPECT_TRUE(s.eigenvalues.empty());
}

TEST(Well, EigenfunctionsMatchAndDecay) {
    auto w = step_well(0, 0, -10, 1, 2000);
    auto s = solve_well(w, 100);
    for (auto& e : s.eigenfunctions) {
        EXPECT_LT(e.matching_residual, 1e-7);
        EXPECT_LT(e.imag_residual, 1e-7);
        EXPECT_FALSE(e.suspect);
        EXPECT_NEAR(e(-1e-12), e(1e-12), 1e-6);
        EXPECT_LT(std::abs(e(6.0)), std::abs(e(1.5)));
    }
}

TEST(Well, ParityOfSymmetricWell) {
    auto w = step_well(0, 0, -10, 1, 2000);
    auto s = solve_well(w, 100);
    for (size_t n = 0; n < s.eigenfunctions.size(); ++n) {
        const auto& e = s.eigenfunctions[n];
        const double sign = n % 2 == 0 ? 1.0 : -1.0;
        for (double t : {0.1, 0.3, 1.5})
            EXPECT_NEAR(e(0.5 + t), sign * e(0.5 - t), 1e-9) << n;
    }
}

TEST(Well, DispersionErrors) {
    auto w = step_well(0, 1, -3, 1, 200);
    WellDispersion E(w, 40);
    EXPECT_THROW(E(2.0), Error);
    try {
        dispersion_series_mu(w, 20);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::alphas_not_equal);
    }
}

TEST(Well, GeneralPathAgreesWithPolynomialPath) {
    auto q = sample(make_grid(0, 10, 2000, 0), [](double x) { return -6.0 / std::pow(std::cosh(x - 5), 2); });
    auto sym = solve_well(make_well(0, 0, q), 120);
    auto gen = solve_well(make_well(0, 1e-300, q), 120);
    ASSERT_EQ(sym.eigenvalues.size(), gen.eigenvalues.size());
    for (size_t i = 0; i < sym.eigenvalues.size(); ++i) EXPECT_NEAR(sym.eigenvalues[i], gen.eigenvalues[i], 1e-8);
    // Poschl-Teller with s(s+1) = 6: -4 and -1, up to the truncation at |x| = 5.
    ASSERT_EQ(sym.eigenvalues.size(), 2u);
    EXPECT_NEAR(sym.eigenvalues[0], -4.0, 1e-3);
    EXPECT_NEAR(sym.eigenvalues[1], -1.0, 1e-3);
}

TEST(WellSpectrum, CoarseGridKeepsAllBoundStates) {
    // Quadrature error makes the mu-series slightly complex; the roots must stay on the axis.
    auto g = make_grid(0, 10, 1000, 0);
    auto w = make_well(0, 0, sample(g, [](double x) { return -12.0 / std::pow(std::cosh(x - 5), 2); }));
    auto s = solve_well(w, 180);
    ASSERT_EQ(s.eigenvalues.size(), 3u);
    for (int n = 0; n < 3; ++n) EXPECT_NEAR(s.eigenvalues[n], -(3 - n) * (3 - n), 1e-5) << n;
}

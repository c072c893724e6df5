#include <gtest/gtest.h>

#include "oracles.hpp"
#include "spps/zakharov_shabat.hpp"

using namespace spps;

TEST(ZS, RequiresSymmetricSupport) {
    EXPECT_THROW(make_zs_potential(constant(make_grid(0, 2, 100, 0), 1.0)), Error);
    EXPECT_THROW(box_potential(1, -1, 100), Error);
}

TEST(ZS, ZeroPotentialHasNoEigenvalues) {
    auto s = zs_eigenvalues(box_potential(0, 1, 2000), 60);
    EXPECT_TRUE(s.eigenvalues.empty());
}

TEST(ZS, ConstantTermIsTwiceCosine) {
    for (double A : {0.3, 1.0, 4.0}) {
        auto d = zs_dispersion(box_potential(A, 1, 2000), 40);
        EXPECT_NEAR(d.series.coeffs[0].real(), 2 * std::cos(2 * A), 1e-12) << A;
    }
    auto g = make_grid(-2, 2, 2000, -2);
    auto pot = make_zs_potential(sample(g, [](double x) { return std::exp(-x * x); }));
    auto d = zs_dispersion(pot, 40);
    EXPECT_NEAR(d.series.coeffs[0].real(), 2 * std::cos(std::sqrt(M_PI) * std::erf(2.0)), 1e-10);
}

TEST(ZS, Unimodularity) {
    auto g = make_grid(-1.5, 1.5, 1000, 0);
    auto pot = make_zs_potential(sample(g, [](double x) { return 2 / std::cosh(2 * x); }));
    EXPECT_LT(zs_dispersion(pot, 30).unimodularity_defect(), 1e-14);
}

TEST(ZS, BoxA1AgainstOracle) {
    auto s = zs_eigenvalues(box_potential(1, 1, 4000), 180);
    ASSERT_EQ(s.eigenvalues.size(), 1u);
    auto ref = oracle::zs_box(1, 1);
    ASSERT_EQ(ref.size(), 1u);
    EXPECT_NEAR(s.eigenvalues[0].lambda.real(), ref[0], 1e-10);
    EXPECT_NEAR(ref[0], 0.31902252414261895, 1e-12);
}

TEST(ZS, BoxA4Count) {
    auto s = zs_eigenvalues(box_potential(4, 1, 2000), 120);
    auto ref = oracle::zs_box(4, 1);
    ASSERT_EQ(s.eigenvalues.size(), ref.size());
    for (size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(s.eigenvalues[i].lambda.real(), ref[i], 1e-8);
}

TEST(ZS, LibraryBoxOracleMatchesTestOracle) {
    for (double A : {1.0, 2.5, 4.0}) {
        auto a = box_oracle(A, 1);
        auto b = oracle::zs_box(A, 1);
        ASSERT_EQ(a.size(), b.size()) << A;
        for (size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
    }
}

TEST(ZS, EigenvectorSatisfiesSystem) {
    auto pot = box_potential(4, 1, 4000);
    auto d = zs_dispersion(pot, 180);
    auto s = zs_eigenvalues(d);
    ASSERT_FALSE(s.eigenvalues.empty());
    for (auto& e : s.eigenvalues) {
        auto v = zs_eigenvector(pot, d, e.lambda);
        EXPECT_LT(v.boundary_residual, 1e-8);
        EXPECT_LT(v.dirac_residual, 1e-3);
    }
    EXPECT_THROW(zs_eigenvector(pot, d, 1.7), Error);
}

TEST(ZS, SmoothPotentialDiracResidual) {
    auto g = make_grid(-3, 3, 4000, 0);
    auto pot = make_zs_potential(sample(g, [](double x) { return 2 / std::cosh(x); }));
    auto d = zs_dispersion(pot, 120);
    auto v = zs_general_solution(d, 0.7);
    EXPECT_LT(zs_system_residual(pot, v), 1e-6);
}

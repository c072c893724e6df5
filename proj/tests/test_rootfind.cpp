#include <gtest/gtest.h>

#include <algorithm>

#include "spps/rootfind.hpp"

using namespace spps;

namespace {

std::vector<cplx> from_roots(const std::vector<cplx>& roots) {
    std::vector<cplx> c{1.0};
    for (cplx r : roots) {
        std::vector<cplx> n(c.size() + 1, 0.0);
        for (size_t k = 0; k < c.size(); ++k) {
            n[k + 1] += c[k];
            n[k] -= r * c[k];
        }
        c = n;
    }
    return c;
}

bool has_root(const std::vector<cplx>& rs, cplx z, double tol) {
    return std::any_of(rs.begin(), rs.end(), [&](cplx r) { return std::abs(r - z) < tol; });
}

} // namespace

TEST(Series, HornerAndDerivative) {
    auto s = make_polynomial(1.0, {1.0, 2.0, 3.0});
    EXPECT_EQ(s(2.0), cplx(6.0));
    EXPECT_EQ(s.derivative(2.0), cplx(8.0));
    EXPECT_EQ(s.magnitude(0.0), 6.0);
    EXPECT_EQ(s.truncated(1).degree(), 1);
}

TEST(PolynomialRoots, QuadraticWithComplexPair) {
    auto s = make_polynomial(0.0, {1.0, 0.0, 1.0});
    auto r = polynomial_roots(s);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_TRUE(has_root(r, cplx(0, 1), 1e-14));
    EXPECT_TRUE(has_root(r, cplx(0, -1), 1e-14));
}

TEST(PolynomialRoots, IntegerRootsDegreeTen) {
    std::vector<cplx> want;
    for (int k = 1; k <= 10; ++k) want.push_back(double(k));
    auto r = polynomial_roots(make_polynomial(0.0, from_roots(want)));
    for (cplx w : want) EXPECT_TRUE(has_root(r, w, 1e-8)) << w;
}

TEST(PolynomialRoots, HonoursCenter) {
    auto s = make_polynomial(5.0, {-4.0, 0.0, 1.0});
    auto r = polynomial_roots(s);
    EXPECT_TRUE(has_root(r, 3.0, 1e-13));
    EXPECT_TRUE(has_root(r, 7.0, 1e-13));
}

TEST(RefineNewton, ConvergesAndFails) {
    auto s = make_polynomial(0.0, {-2.0, 0.0, 1.0});
    EXPECT_NEAR(refine_newton(s, 1.3).real(), std::sqrt(2.0), 1e-15);
    auto flat = make_polynomial(0.0, {1.0, 0.0, 1.0});
    EXPECT_THROW(refine_newton(flat, 0.0), Error);
}

TEST(Constraint, Admits) {
    EXPECT_TRUE(RootConstraint::none().admits(cplx(-5, 3)));
    EXPECT_TRUE(RootConstraint::right_half_plane().admits(0.1));
    EXPECT_FALSE(RootConstraint::right_half_plane().admits(-0.1));
    auto iv = RootConstraint::real_interval(0, 10);
    EXPECT_TRUE(iv.admits(cplx(5, 1e-12)));
    EXPECT_FALSE(iv.admits(cplx(5, 1e-3)));
    EXPECT_FALSE(iv.admits(11.0));
    EXPECT_TRUE(RootConstraint::disk(cplx(1, 1), 0.5).admits(cplx(1.2, 1.2)));
}

TEST(FindRoots, SineSeriesGivesIntegerMultiplesOfPi) {
    // sin(pi sqrt(z)) / (pi sqrt(z)) as a series in z vanishes at z = 1, 4, 9, ...
    std::vector<cplx> c;
    double term = 1.0;
    for (int k = 0; k <= 60; ++k) {
        c.push_back(term);
        term *= -M_PI * M_PI / ((2.0 * k + 2) * (2.0 * k + 3));
    }
    auto s = make_series(0.0, c);
    auto rep = find_roots(s, RootConstraint::real_interval(0, 1e9));
    ASSERT_GE(rep.roots.size(), 5u);
    std::vector<double> re;
    for (auto& r : rep.roots) re.push_back(r.lambda.real());
    std::sort(re.begin(), re.end());
    for (int n = 1; n <= 5; ++n) EXPECT_NEAR(re[n - 1], n * n, 1e-10);
    for (auto& r : rep.roots) EXPECT_LE(r.residual, 1e-8);
}

TEST(FindRoots, ConstraintDiscardsAreReported) {
    auto s = make_polynomial(0.0, from_roots({1.0, -1.0, cplx(0, 2)}));
    auto rep = find_roots(s, RootConstraint::right_half_plane());
    ASSERT_EQ(rep.roots.size(), 1u);
    EXPECT_NEAR(rep.roots[0].lambda.real(), 1.0, 1e-13);
    int constraint = 0;
    for (auto& d : rep.discarded) constraint += d.reason == DiscardReason::constraint;
    EXPECT_EQ(constraint, 2);
}

TEST(FindRoots, DoubleRootMerged) {
    auto s = make_polynomial(0.0, from_roots({2.0, 2.0, -3.0}));
    RootFilterOptions opt;
    opt.merge_tol = 1e-6;
    opt.max_error = 1e-4;
    opt.tol_stab = 1e-4;
    auto rep = find_roots(s, RootConstraint::right_half_plane(), opt);
    ASSERT_EQ(rep.roots.size(), 1u);
    EXPECT_NEAR(rep.roots[0].lambda.real(), 2.0, 1e-6);
    EXPECT_EQ(rep.roots[0].multiplicity, 2);
}

TEST(SignScan, FindsSimpleZeros) {
    auto r = sign_scan_roots([](double x) { return std::cos(x); }, 0, 10, 100);
    ASSERT_EQ(r.size(), 3u);
    EXPECT_NEAR(r[0], M_PI / 2, 1e-13);
    EXPECT_NEAR(r[2], 5 * M_PI / 2, 1e-13);
}

TEST(MergeRoots, CollapsesCloseRoots) {
    std::vector<FoundRoot> v{{1.0}, {1.0 + 1e-12}, {2.0}};
    auto m = merge_roots(v, 1e-8);
    ASSERT_EQ(m.size(), 2u);
}

TEST(TrustRadius, GrowsWithFasterDecay) {
    std::vector<cplx> slow, fast;
    for (int k = 0; k <= 30; ++k) {
        slow.push_back(std::pow(0.5, k));
        fast.push_back(1.0 / std::tgamma(k + 1.0));
    }
    EXPECT_LT(default_trust_radius(slow), default_trust_radius(fast));
}

TEST(FilterRoots, KeepsRootBesideCenter) {
    // Magnitude near the center is tiny compared with the slope; rounding of lambda alone
    // must not count as a residual failure.
    CharacteristicSeries s;
    s.center = 156.25;
    s.coeffs = {-3e3 * 1.6e-7, 3e3, 30.0, 1.0};
    auto rep = find_roots(s, RootConstraint::real_interval(150, 160));
    ASSERT_EQ(rep.roots.size(), 1u);
    EXPECT_NEAR(rep.roots[0].lambda.real(), 156.25 + 1.6e-7, 1e-12);
}

// Seeded randomized suites over smooth coefficient profiles, 20 cases each.

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "spps/spps.hpp"

using namespace spps;

namespace {

constexpr int kCases = 20;

// a0 + sum_j (a_j cos(j w x) + b_j sin(j w x)) with small random amplitudes.
struct Trig {
    double a0 = 0, w = 1;
    std::vector<double> a, b;
    double operator()(double x) const {
        double s = a0;
        for (size_t j = 0; j < a.size(); ++j) s += a[j] * std::cos((j + 1) * w * x) + b[j] * std::sin((j + 1) * w * x);
        return s;
    }
};

Trig random_trig(std::mt19937_64& rng, double a0, double amp, int terms, double w) {
    std::uniform_real_distribution<double> u(-amp, amp);
    Trig t{a0, w, {}, {}};
    for (int j = 0; j < terms; ++j) {
        t.a.push_back(u(rng));
        t.b.push_back(u(rng));
    }
    return t;
}

} // namespace

TEST(Properties, FormalPowerAnchorAndEstimate) {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> anchor(0.0, 2.0);
    for (int c = 0; c < kCases; ++c) {
        auto g = make_grid(0, 2, 400, anchor(rng));
        auto w1 = random_trig(rng, 1.0, 0.3, 3, 1.7), w2 = random_trig(rng, 1.2, 0.3, 3, 2.3);
        WeightPair w{sample(g, w1), sample(g, w2)};
        auto xt = build_family(FamilyKind::Xtilde, w, 30);
        auto x = build_family(FamilyKind::X, w, 31);
        for (int n = 1; n <= 30; ++n) {
            EXPECT_EQ(xt.members[n].at_anchor(), cplx(0.0)) << c;
            EXPECT_EQ(x.members[n].at_anchor(), cplx(0.0)) << c;
        }
        for (int k = 1; 2 * k <= 30; ++k) EXPECT_LE(xt.members[2 * k].max_abs(), even_member_bound(w, k) * (1 + 1e-10)) << c;
        for (int k = 0; 2 * k + 1 <= 31; ++k)
            EXPECT_LE(x.members[2 * k + 1].max_abs(), odd_member_bound(w, k) * (1 + 1e-10)) << c;
    }
}

TEST(Properties, WronskianConstancy) {
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> lam_re(-20, 40), lam_im(-5, 5);
    for (int c = 0; c < kCases; ++c) {
        auto g = make_grid(0, 1.5, 1500, 0);
        auto P = random_trig(rng, -1.0, 0.2, 2, 2.0), Q = random_trig(rng, 0.0, 3.0, 3, 3.0),
             R = random_trig(rng, 1.0, 0.2, 2, 1.5);
        auto co = make_sl_coefficients(sample(g, P), sample(g, Q), sample(g, R));
        auto pr = build_solution_pair(co, nonvanishing_u0(co, 100), 80);
        const cplx lam(lam_re(rng), lam_im(rng));
        auto w = wronskian(pr, lam);
        double drift = 0;
        for (auto v : w.values) drift = std::max(drift, std::abs(v - w[0]));
        EXPECT_LT(drift, 1e-8 * std::abs(w[0])) << c << " lambda " << lam;
    }
}

TEST(Properties, InitialConditionsAtAnchor) {
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> lam(-30, 30), x0(0.0, 1.0);
    for (int c = 0; c < kCases; ++c) {
        auto g = make_grid(0, 1, 800, x0(rng));
        auto P = random_trig(rng, 1.5, 0.3, 2, 2.0), Q = random_trig(rng, 0.0, 2.0, 3, 4.0),
             R = random_trig(rng, 1.0, 0.3, 2, 3.0);
        auto co = make_sl_coefficients(sample(g, P), sample(g, Q), sample(g, R));
        auto pr = build_solution_pair(co, nonvanishing_u0(co, 80), 40);
        const int k = g.x0_index;
        const cplx u0 = pr.particular.u0[k], u0p = pr.particular.u0_prime[k], p0 = co.p[k];
        const cplx l(lam(rng), lam(rng) / 5);
        auto a = eval_at(pr, Which::u1, l, k);
        auto b = eval_at(pr, Which::u2, l, k);
        EXPECT_LT(std::abs(a.value - u0), 1e-14 * std::abs(u0)) << c;
        EXPECT_LT(std::abs(a.derivative - u0p), 1e-13 * (1 + std::abs(u0p))) << c;
        EXPECT_LT(std::abs(b.value), 1e-15) << c;
        EXPECT_LT(std::abs(b.derivative - 1.0 / (u0 * p0)), 1e-13 * std::abs(1.0 / (u0 * p0))) << c;
    }
}

TEST(Properties, FloquetMultipliersMultiplyToOne) {
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> lam(-5, 30);
    for (int c = 0; c < kCases; ++c) {
        auto g = make_grid(0, M_PI, 1200, 0);
        auto p = random_trig(rng, 1.0, 0.15, 2, 2.0), q = random_trig(rng, 0.0, 2.0, 3, 2.0);
        auto pb = make_periodic_problem(sample(g, p), sample(g, q));
        const double l = lam(rng);
        auto f = fundamental_at_lambda0(pb, l, 140);
        auto b = bloch_solutions(f);
        EXPECT_LT(std::abs(b.beta_plus * b.beta_minus - 1.0), 1e-9) << c << " lambda " << l;
        EXPECT_NEAR(f.discriminant().real(), oracle::hill_discriminant(p, q, M_PI, l, 8000), 1e-7 * (1 + std::abs(f.discriminant())))
            << c;
    }
}

TEST(Properties, BandEdgesInterlaceAndMatchFourier) {
    std::mt19937_64 rng(505);
    std::uniform_real_distribution<double> amp(-2.0, 2.0);
    for (int c = 0; c < kCases; ++c) {
        std::vector<double> coef{amp(rng), amp(rng), amp(rng) / 2, amp(rng) / 4};
        auto q = [&](double x) {
            double s = coef[0];
            for (int j = 1; j < 4; ++j) s += coef[j] * std::cos(2 * j * x);
            return s;
        };
        auto g = make_grid(0, M_PI, 1500, 0);
        auto e = band_edges(make_periodic_problem(constant(g, 1.0), sample(g, q)), 80, 5);
        auto ref = oracle::hill_fourier_edges(coef, M_PI, 5);
        EXPECT_TRUE(e.interlaced) << c;
        ASSERT_EQ(e.all.size(), 5u) << c;
        for (int n = 0; n < 5; ++n) EXPECT_NEAR(e.all[n], ref[n], 1e-6 * (1 + std::abs(ref[n]))) << c << " n " << n;
    }
}

TEST(Properties, WellBoundaryMatchingResiduals) {
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> depth(4, 15), a2(0, 3), h(0.8, 2.0);
    for (int c = 0; c < kCases; ++c) {
        const double H = h(rng), D = depth(rng), A2 = c % 2 == 0 ? 0.0 : a2(rng);
        auto bump = random_trig(rng, -D, 0.2 * D, 2, M_PI / H);
        auto w = make_well(0, A2, sample(make_grid(0, H, 1500, 0), bump));
        auto s = solve_well(w, 100);
        auto ref = oracle::well_eigenvalues(0, A2, bump, H, w.q_min() + 1e-9, 1500);
        ASSERT_EQ(s.eigenvalues.size(), ref.size()) << c;
        for (size_t i = 0; i < ref.size(); ++i) {
            EXPECT_NEAR(s.eigenvalues[i], ref[i], 1e-7 * (1 + std::abs(ref[i]))) << c;
            EXPECT_LT(s.eigenfunctions[i].matching_residual, 1e-7) << c;
        }
    }
}

TEST(Properties, SLBoundaryResiduals) {
    std::mt19937_64 rng(707);
    std::uniform_real_distribution<double> angle(-1.4, 1.4);
    for (int c = 0; c < kCases; ++c) {
        auto g = make_grid(0, 2, 1500, 0);
        auto P = random_trig(rng, -1.0, 0.2, 2, 2.0), Q = random_trig(rng, 0.0, 2.0, 2, 3.0);
        const double a = angle(rng), b = angle(rng);
        SLProblem pb{make_sl_coefficients(sample(g, P), sample(g, Q), constant(g, 1.0)), {a},
                     BoundaryConditionUnmixed{b}, RootConstraint::real_interval(-50, 1e9)};
        auto pr = center_pair(pb, 100);
        auto r = solve(pb, 100, 0);
        ASSERT_GE(r.eigenvalues.size(), 3u) << c;
        for (auto& e : r.eigenvalues) {
            auto [l, rr] = boundary_residuals(pb, pr, e.lambda);
            EXPECT_LT(l, 1e-8) << c;
            EXPECT_LT(rr, 1e-8) << c << " lambda " << e.lambda;
        }
        // The lowest three against shooting with u(0) = sin a, (p u')(0) = -cos a p(0).
        auto one = [](double) { return 1.0; };
        auto miss = [&](double lam) {
            auto y = oracle::shoot_sl(P, Q, one, lam, 0, 2, {std::sin(a), -std::cos(a) * P(0)}, 3000);
            return (y[0] * std::cos(b) + y[1] / P(2) * std::sin(b)).real();
        };
        auto ref = oracle::scan_roots(miss, -50, r.eigenvalues[2].lambda.real() + 1.0, 600);
        ASSERT_GE(ref.size(), 3u) << c;
        for (int n = 0; n < 3; ++n) EXPECT_NEAR(r.eigenvalues[n].lambda.real(), ref[n], 1e-7 * (1 + std::abs(ref[n]))) << c;
    }
}

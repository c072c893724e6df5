#pragma once

#include <optional>

#include "spps/formal_powers.hpp"

namespace spps {

// Coefficients of (p u')' + q u = lambda r u on a common grid.
struct SLCoefficients {
    SampledFunction p, q, r;
    const Grid& grid() const { return p.grid; }
};

inline SLCoefficients make_sl_coefficients(SampledFunction p, SampledFunction q, SampledFunction r) {
    if (!(p.grid == q.grid) || !(p.grid == r.grid)) throw Error(ErrorCode::grid_mismatch, "p, q, r on different grids");
    for (int i = 0; i < p.size(); ++i)
        if (p[i] == cplx(0.0)) throw Error(ErrorCode::division_by_zero, "p vanishes at node " + std::to_string(i), i);
    return {std::move(p), std::move(q), std::move(r)};
}

struct ParticularSolution {
    SampledFunction u0, u0_prime;
    cplx lambda_center = 0.0;
};

struct HomogeneousPair {
    SampledFunction v1, v1_prime, v2, v2_prime;
    double tail = 0;
};

// Two solutions of (p v')' + q v = 0 with v1(x0)=1, v1'(x0)=0, v2(x0)=0, v2'(x0)=1/p(x0).
inline HomogeneousPair homogeneous_pair(const SLCoefficients& c, int N = 120, double tol = 1e-12) {
    WeightPair w{scale(c.q, -1.0), reciprocal(c.p)};
    const int order = 2 * N + 1;
    auto yt = build_family(FamilyKind::Ytilde, w, order);
    auto y = build_family(FamilyKind::Y, w, order);
    const auto& inv_p = w.w_even;
    HomogeneousPair out;
    auto [v1, t1] = evaluate_profile(yt, 0, 2, 1.0);
    auto [s1, t2] = evaluate_profile(yt, 1, 2, 1.0);
    auto [v2, t3] = evaluate_profile(y, 1, 2, 1.0);
    auto [s2, t4] = evaluate_profile(y, 0, 2, 1.0);
    out.v1 = std::move(v1);
    out.v1_prime = multiply(inv_p, s1);
    out.v2 = std::move(v2);
    out.v2_prime = multiply(inv_p, s2);
    out.tail = std::max({t1, t2, t3, t4});
    double scale_ref = std::max({1.0, out.v1.max_abs(), out.v2.max_abs(), s1.max_abs(), s2.max_abs()});
    if (out.tail > tol * scale_ref)
        throw Error(ErrorCode::nonconvergent_tail, "homogeneous series tail " + std::to_string(out.tail) +
                                                       " exceeds tolerance; raise N");
    return out;
}

namespace detail {
inline void require_real(const SampledFunction& f, const char* name) {
    if (f.max_abs_imag() > 1e-14 * std::max(1.0, f.max_abs()))
        throw Error(ErrorCode::complex_coefficients_unsupported, std::string(name) + " has a nonzero imaginary part");
}
inline void require_nonvanishing(const SampledFunction& u) {
    double mx = u.max_abs();
    for (int i = 0; i < u.size(); ++i)
        if (!(std::abs(u[i]) > 1e-300) || !(std::abs(u[i]) > 1e-13 * mx))
            throw Error(ErrorCode::vanishing_u0, "particular solution vanishes at node " + std::to_string(i), i);
}
} // namespace detail

// u0 = v1 + c v2 normalised so that u0(x0) = 1 and u0'(x0) = slope. The default slope i / p(x0)
// gives u0 = v1 + i v2. A slope with nonzero imaginary part keeps u0 nodeless for real p, q.
inline ParticularSolution nonvanishing_u0(const SLCoefficients& c, int N = 120, std::optional<cplx> slope = {}) {
    detail::require_real(c.p, "p");
    detail::require_real(c.q, "q");
    auto hp = homogeneous_pair(c, N);
    const cplx p0 = c.p.at_anchor();
    const cplx k = slope ? *slope * p0 : cplx(0.0, 1.0);
    ParticularSolution ps;
    ps.u0 = add(hp.v1, scale(hp.v2, k));
    ps.u0_prime = add(hp.v1_prime, scale(hp.v2_prime, k));
    ps.lambda_center = 0.0;
    detail::require_nonvanishing(ps.u0);
    return ps;
}

// Max-node central-difference residual of (p u0')' + (q - lambda_center r) u0, relative to the
// magnitude of the individual terms.
inline double particular_residual(const SLCoefficients& c, const ParticularSolution& ps) {
    const Grid& g = c.grid();
    const double h = g.h();
    double worst = 0;
    for (int i = 1; i < g.m; ++i) {
        cplx flux_r = 0.5 * (c.p[i] * ps.u0_prime[i] + c.p[i + 1] * ps.u0_prime[i + 1]);
        cplx flux_l = 0.5 * (c.p[i] * ps.u0_prime[i] + c.p[i - 1] * ps.u0_prime[i - 1]);
        cplx d = (flux_r - flux_l) / h;
        cplx qterm = (c.q[i] - ps.lambda_center * c.r[i]) * ps.u0[i];
        double sc = std::abs(d) + std::abs(qterm) + 1e-300;
        worst = std::max(worst, std::abs(d + qterm) / sc);
    }
    return worst;
}

struct SppsSolutionPair {
    SLCoefficients coeffs;
    ParticularSolution particular;
    FormalPowerFamily xtilde, x;
    cplx center = 0.0;
    int N = 0;

    const Grid& grid() const { return coeffs.grid(); }
};

inline SppsSolutionPair build_solution_pair(const SLCoefficients& c, const ParticularSolution& ps, int N,
                                            Quadrature rule = Quadrature::spline) {
    if (N < 1) throw Error(ErrorCode::invalid_argument, "N must be at least 1");
    detail::require_nonvanishing(ps.u0);
    auto u0sq = multiply(ps.u0, ps.u0);
    WeightPair w{multiply(u0sq, c.r), reciprocal(multiply(u0sq, c.p))};
    SppsSolutionPair pair;
    pair.coeffs = c;
    pair.particular = ps;
    pair.center = ps.lambda_center;
    pair.N = N;
    pair.xtilde = build_family(FamilyKind::Xtilde, w, 2 * N + 1, rule);
    pair.x = build_family(FamilyKind::X, w, 2 * N + 1, rule);
    return pair;
}

enum class Which { u1, u2 };

struct SolutionProfile {
    SampledFunction value, derivative;
    double tail = 0;
};

struct SolutionPoint {
    cplx value, derivative;
    double tail = 0;
};

inline SolutionPoint eval_at(const SppsSolutionPair& pr, Which which, cplx lambda, int node) {
    const cplx z = lambda - pr.center;
    const cplx u0 = pr.particular.u0[node], u0p = pr.particular.u0_prime[node], p = pr.coeffs.p[node];
    SolutionPoint out;
    if (which == Which::u1) {
        auto s = evaluate_strided(pr.xtilde, 0, 2, z, node);
        auto d = evaluate_strided(pr.xtilde, 1, 2, z, node);
        out.value = u0 * s.value;
        out.derivative = u0p / u0 * out.value + z * d.value / (u0 * p);
        out.tail = std::max(std::abs(u0) * s.tail, std::abs(z) * d.tail / std::abs(u0 * p));
    } else {
        auto s = evaluate_strided(pr.x, 1, 2, z, node);
        auto d = evaluate_strided(pr.x, 0, 2, z, node);
        out.value = u0 * s.value;
        out.derivative = u0p / u0 * out.value + d.value / (u0 * p);
        out.tail = std::max(std::abs(u0) * s.tail, d.tail / std::abs(u0 * p));
    }
    return out;
}

inline SolutionProfile eval(const SppsSolutionPair& pr, Which which, cplx lambda) {
    const cplx z = lambda - pr.center;
    const auto& u0 = pr.particular.u0;
    const auto& u0p = pr.particular.u0_prime;
    const auto& fam = which == Which::u1 ? pr.xtilde : pr.x;
    auto [s, ts] = evaluate_profile(fam, which == Which::u1 ? 0 : 1, 2, z);
    auto [d, td] = evaluate_profile(fam, which == Which::u1 ? 1 : 0, 2, z);
    const cplx dfac = which == Which::u1 ? z : cplx(1.0);
    SolutionProfile out;
    out.value = multiply(u0, s);
    out.derivative = SampledFunction(u0.grid);
    for (int i = 0; i < u0.size(); ++i)
        out.derivative[i] = u0p[i] / u0[i] * out.value[i] + dfac * d[i] / (u0[i] * pr.coeffs.p[i]);
    out.tail = std::max(ts * u0.max_abs(), td * std::abs(dfac));
    return out;
}

// p (u1 u2' - u1' u2), constant in x for an exact pair.
inline SampledFunction wronskian(const SppsSolutionPair& pr, cplx lambda) {
    auto a = eval(pr, Which::u1, lambda);
    auto b = eval(pr, Which::u2, lambda);
    SampledFunction w(pr.grid());
    for (int i = 0; i < w.size(); ++i)
        w[i] = pr.coeffs.p[i] * (a.value[i] * b.derivative[i] - a.derivative[i] * b.value[i]);
    return w;
}

} // namespace spps

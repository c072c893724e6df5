#pragma once

#include "spps/formal_powers.hpp"
#include "spps/rootfind.hpp"
#include "spps/spps_core.hpp"

namespace spps {

// n1' - lambda n1 = U n2, n2' + lambda n2 = -U n1 with real U supported on [-a, a].
struct ZSPotential {
    SampledFunction U;

    double a() const { return 0.5 * (U.grid.b - U.grid.a); }
};

inline ZSPotential make_zs_potential(SampledFunction U) {
    detail::require_real(U, "U");
    const double c = 0.5 * (U.grid.a + U.grid.b);
    if (std::abs(c) > 1e-12 * (1 + U.grid.b - U.grid.a))
        throw Error(ErrorCode::invalid_interval, "support must be symmetric about the origin");
    return {SampledFunction(with_anchor(U.grid, 0), U.values)};
}

inline ZSPotential box_potential(double A, double a, int m) {
    if (!(a > 0)) throw Error(ErrorCode::invalid_argument, "half-width must be positive");
    return make_zs_potential(constant(make_grid(-a, a, m, -a), A));
}

struct ZSDispersion {
    SampledFunction Q;         // i times the running integral of U from -a
    FormalPowerFamily x, xtilde; // weights e^{-2Q} and e^{2Q} at odd orders respectively
    CharacteristicSeries series;

    double unimodularity_defect() const {
        double d = 0;
        for (auto z : Q.values) d = std::max(d, std::abs(std::abs(std::exp(2.0 * z)) - 1.0));
        return d;
    }
};

inline ZSDispersion zs_dispersion(const ZSPotential& pot, int N) {
    if (N < 1) throw Error(ErrorCode::invalid_argument, "order must be at least 1");
    ZSDispersion d;
    d.Q = scale(cumulative_integral(pot.U), cplx(0, 1));
    auto ep = map(d.Q, [](cplx z) { return std::exp(2.0 * z); });
    auto em = map(d.Q, [](cplx z) { return std::exp(-2.0 * z); });
    WeightPair w{ep, em};
    d.x = build_family(FamilyKind::X, w, N);
    d.xtilde = build_family(FamilyKind::Xtilde, w, N);
    const int m = pot.U.grid.m;
    const cplx Qa = d.Q[m], ep_a = std::exp(Qa), em_a = std::exp(-Qa);
    std::vector<cplx> c(N + 1);
    for (int n = 0; n <= N; ++n) {
        const bool even = n % 2 == 0;
        c[n] = (even ? ep_a : em_a) * d.xtilde.members[n][m] + (even ? em_a : ep_a) * d.x.members[n][m];
        // Conjugate weights make every coefficient real; drop the rounding imaginary part.
        c[n] = cplx(c[n].real(), 0.0);
    }
    d.series = make_series(0.0, std::move(c));
    return d;
}

struct ZSSpectrum {
    std::vector<Eigenvalue> eigenvalues; // real, ascending
    std::vector<Eigenvalue> nonreal;     // passed every filter but sit off the axis
    std::vector<DiscardedRoot> discarded;
    int N = 0;
};

struct ZSOptions {
    RootFilterOptions filter;
    double real_tol = 1e-8; // |Im| below real_tol (1 + |lambda|) counts as real
};

inline ZSSpectrum zs_eigenvalues(const ZSDispersion& d, const ZSOptions& opt = {}) {
    ZSSpectrum out;
    out.N = d.series.degree();
    auto rep = find_roots(d.series, RootConstraint::right_half_plane(0.0), opt.filter);
    out.discarded = rep.discarded;
    for (auto& r : rep.roots) {
        Eigenvalue e{r.lambda, r.residual, r.error_estimate, 0.0, r.multiplicity};
        if (std::abs(r.lambda.imag()) <= opt.real_tol * (1 + std::abs(r.lambda))) {
            e.lambda = cplx(r.lambda.real(), 0.0);
            out.eigenvalues.push_back(e);
        } else {
            out.nonreal.push_back(e);
        }
    }
    auto by_re = [](const Eigenvalue& l, const Eigenvalue& r) { return l.lambda.real() < r.lambda.real(); };
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), by_re);
    std::sort(out.nonreal.begin(), out.nonreal.end(), by_re);
    return out;
}

inline ZSSpectrum zs_eigenvalues(const ZSPotential& pot, int N, const ZSOptions& opt = {}) {
    return zs_eigenvalues(zs_dispersion(pot, N), opt);
}

struct ZSEigenpair {
    cplx lambda;
    SampledFunction n1, n2;
    SampledFunction psi1, psi2, phi1, phi2;
    double boundary_residual = 0; // |n1(a)| / max |n1|
    double dirac_residual = 0;    // max-node residual of the first-order system, relative
};

inline ZSEigenpair zs_general_solution(const ZSDispersion& d, cplx lambda) {
    ZSEigenpair e;
    e.lambda = lambda;
    auto Et = evaluate_profile(d.xtilde, 0, 2, lambda * lambda).first;
    auto Ot = scale(evaluate_profile(d.xtilde, 1, 2, lambda * lambda).first, lambda);
    auto Ex = evaluate_profile(d.x, 0, 2, lambda * lambda).first;
    auto Ox = scale(evaluate_profile(d.x, 1, 2, lambda * lambda).first, lambda);
    const Grid& g = d.Q.grid;
    e.psi1 = SampledFunction(g);
    e.psi2 = SampledFunction(g);
    e.phi1 = SampledFunction(g);
    e.phi2 = SampledFunction(g);
    const cplx I(0, 1);
    for (int i = 0; i <= g.m; ++i) {
        const cplx p = std::exp(d.Q[i]), q = 1.0 / p;
        e.psi1[i] = 0.5 * (p * Et[i] + q * Ot[i]);
        e.psi2[i] = 0.5 * I * (p * Et[i] - q * Ot[i]);
        e.phi1[i] = 0.5 * (q * Ex[i] + p * Ox[i]);
        e.phi2[i] = -0.5 * I * (q * Ex[i] - p * Ox[i]);
    }
    e.n1 = add(e.psi1, e.phi1);
    e.n2 = add(e.psi2, e.phi2);
    return e;
}

// Residual of n1' - lambda n1 - U n2 and n2' + lambda n2 + U n1 relative to the term sizes.
inline double zs_system_residual(const ZSPotential& pot, const ZSEigenpair& e) {
    auto d1 = spline_derivative(e.n1), d2 = spline_derivative(e.n2);
    double worst = 0;
    for (int i = 0; i <= e.n1.grid.m; ++i) {
        const cplx U = pot.U[i];
        const cplx r1 = d1[i] - e.lambda * e.n1[i] - U * e.n2[i];
        const cplx r2 = d2[i] + e.lambda * e.n2[i] + U * e.n1[i];
        const double sc = std::abs(d1[i]) + std::abs(d2[i]) + (std::abs(e.lambda) + std::abs(U)) *
                                                                    (std::abs(e.n1[i]) + std::abs(e.n2[i]));
        worst = std::max(worst, (std::abs(r1) + std::abs(r2)) / std::max(sc, 1e-300));
    }
    return worst;
}

inline ZSEigenpair zs_eigenvector(const ZSPotential& pot, const ZSDispersion& d, cplx lambda, double tol = 1e-6) {
    auto e = zs_general_solution(d, lambda);
    e.boundary_residual = std::abs(e.n1.back()) / std::max(e.n1.max_abs(), 1e-300);
    e.dirac_residual = zs_system_residual(pot, e);
    if (e.boundary_residual > tol)
        throw Error(ErrorCode::residual_too_large, "n1(a) does not vanish; lambda is not an eigenvalue");
    return e;
}

// Real eigenvalues of the box U = A on |x| < a from cos(2 g a) + lambda sin(2 g a) / g = 0,
// g = sqrt(A^2 - lambda^2). This form has no spurious zero at lambda = A.
inline std::vector<double> box_oracle(double A, double a, int scan = 20000) {
    if (!(A > 0) || !(a > 0)) throw Error(ErrorCode::invalid_argument, "box height and half-width must be positive");
    auto f = [&](double l) {
        const double g = std::sqrt(std::max(0.0, A * A - l * l));
        const double t = 2 * g * a;
        const double sinc = t < 1e-8 ? 1.0 - t * t / 6.0 : std::sin(t) / t;
        return std::cos(t) + 2 * a * l * sinc;
    };
    return sign_scan_roots(f, 0.0, A, scan, 1e-15);
}

} // namespace spps

#pragma once

#include "spps/parallel.hpp"
#include "spps/sl_spectral.hpp"

namespace spps {

// -u'' + Q u = lambda u on the line with Q = alpha1 for x < 0, q on [0, h], alpha2 for x > h.
struct WellPotential {
    double alpha1 = 0, alpha2 = 0;
    SampledFunction q; // on [0, h]

    double h() const { return q.grid.b - q.grid.a; }
    double q_min() const {
        double r = INFINITY;
        for (auto v : q.values) r = std::min(r, v.real());
        return r;
    }
};

inline WellPotential make_well(double alpha1, double alpha2, SampledFunction q) {
    detail::require_real(q, "q");
    return {alpha1, alpha2, detail::reanchored(q, 0)};
}

struct WellEigenfunction {
    double lambda = 0, mu = 0, nu = 0;
    SampledFunction inside, inside_prime; // u1 + (i - mu) u2 on [0, h], real up to roundoff
    double matching_residual = 0;         // |u'(h) + nu u(h)| relative to its terms
    double imag_residual = 0;             // largest imaginary part of the inside profile, relative
    bool suspect = false;

    // The three-piece eigenfunction at any x.
    double operator()(double x) const {
        const double h = inside.grid.b;
        if (x < 0) return std::exp(mu * x);
        if (x > h) return inside.back().real() * std::exp(-nu * (x - h));
        return interpolate(inside, x).real();
    }
};

struct WellSpectrum {
    std::vector<double> eigenvalues;
    std::vector<WellEigenfunction> eigenfunctions;
    double search_lo = 0, search_hi = 0;
    std::vector<DiscardedRoot> discarded;
};

// The SPPS pair on [0, h] with p = -1, r = 1, u0(0) = 1, u0'(0) = i.
inline SppsSolutionPair well_pair(const WellPotential& w, int order_N, double shift = 0.0) {
    const Grid& g = w.q.grid;
    auto c = make_sl_coefficients(constant(g, -1.0), add(w.q, constant(g, -shift)), constant(g, 1.0));
    auto u0 = nonvanishing_u0(c, 120, cplx(0.0, 1.0));
    return build_solution_pair(c, u0, order_N);
}

// u'(h) + nu u(h) for the solution with u(0) = 1, u'(0) = mu, at real lambda < min(alpha1, alpha2).
class WellDispersion {
  public:
    WellDispersion(const WellPotential& w, int N) : w_(w), pair_(well_pair(w, N)) {}

    cplx operator()(double lambda, double* tail = nullptr) const {
        if (!(lambda < std::min(w_.alpha1, w_.alpha2)))
            throw Error(ErrorCode::lambda_out_of_range, "lambda must lie below both asymptotic levels");
        const int m = pair_.grid().m;
        const double mu = std::sqrt(w_.alpha1 - lambda), nu = std::sqrt(w_.alpha2 - lambda);
        auto a = eval_at(pair_, Which::u1, lambda, m);
        auto b = eval_at(pair_, Which::u2, lambda, m);
        const cplx c = cplx(0, 1) - mu;
        if (tail) *tail = std::max(a.tail, std::abs(c) * b.tail);
        return (a.derivative + c * b.derivative) + nu * (a.value + c * b.value);
    }

    const SppsSolutionPair& pair() const { return pair_; }
    const WellPotential& well() const { return w_; }

  private:
    WellPotential w_;
    SppsSolutionPair pair_;
};

// Coefficients of sum a_k mu^k for alpha1 = alpha2 = 0, lambda = -mu^2. `pair` must come from
// well_pair with families of order at least N + 1.
inline CharacteristicSeries dispersion_series_mu(const SppsSolutionPair& pair, int N) {
    if (pair.x.order < N + 1) throw Error(ErrorCode::insufficient_order, "families too short for the requested degree");
    const int m = pair.grid().m;
    const cplx u0 = pair.particular.u0[m], u0p = pair.particular.u0_prime[m];
    const cplx I(0, 1);
    auto X = [&](int n) { return pair.x.members[n][m]; };
    auto Xt = [&](int n) { return pair.xtilde.members[n][m]; };
    std::vector<cplx> a(N + 1);
    for (int k = 0; k <= N; ++k) {
        const int n = k / 2;
        const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
        if (k == 0) {
            a[0] = u0p * (1.0 + I * X(1)) - I / u0;
        } else if (k % 2 == 0) {
            a[k] = sgn * (u0p * Xt(2 * n) - Xt(2 * n - 1) / u0 + I * u0p * X(2 * n + 1) - I / u0 * X(2 * n) + u0 * X(2 * n - 1));
        } else {
            a[k] = sgn * (-u0p * X(2 * n + 1) + X(2 * n) / u0 + I * u0 * X(2 * n + 1) + u0 * Xt(2 * n));
        }
    }
    // The combination is the real solution with u(0) = 1, u'(0) = mu, so every coefficient is
    // real; the imaginary parts are quadrature error and would push roots off the axis.
    for (auto& c : a) c = cplx(c.real(), 0.0);
    return make_series(0.0, std::move(a));
}

inline CharacteristicSeries dispersion_series_mu(const WellPotential& w, int N) {
    if (w.alpha1 != w.alpha2) throw Error(ErrorCode::alphas_not_equal, "the mu-series needs alpha1 = alpha2");
    return dispersion_series_mu(well_pair(w, N / 2 + 1, w.alpha1), N);
}

inline WellEigenfunction well_eigenfunction(const WellPotential& w, const SppsSolutionPair& pr, double lambda,
                                            double shift = 0.0) {
    WellEigenfunction e;
    e.lambda = lambda;
    e.mu = std::sqrt(w.alpha1 - lambda);
    e.nu = std::sqrt(w.alpha2 - lambda);
    const double lam = lambda - shift;
    auto a = eval(pr, Which::u1, lam);
    auto b = eval(pr, Which::u2, lam);
    const cplx c = cplx(0, 1) - e.mu;
    auto v = add(a.value, scale(b.value, c));
    auto d = add(a.derivative, scale(b.derivative, c));
    const double sc = std::max(v.max_abs(), 1e-300), scd = std::max(d.max_abs(), 1e-300);
    e.imag_residual = std::max(v.max_abs_imag() / sc, d.max_abs_imag() / scd);
    e.inside = map(v, [](cplx z) { return cplx(z.real()); });
    e.inside_prime = map(d, [](cplx z) { return cplx(z.real()); });
    const int m = v.size() - 1;
    // Relative to the terms that cancel in u'(h) + nu u(h), which set its noise floor.
    const double terms = std::abs(a.derivative[m]) + std::abs(c) * std::abs(b.derivative[m]) +
                         e.nu * (std::abs(a.value[m]) + std::abs(c) * std::abs(b.value[m]));
    e.matching_residual = std::abs(d[m] + e.nu * v[m]) / std::max({terms, scd + e.nu * sc, 1e-300});
    e.suspect = e.imag_residual > 1e-6 || e.matching_residual > 1e-6;
    return e;
}

struct WellOptions {
    int scan_points = 1024;
    RootFilterOptions filter;
};

// Bound states: the polynomial route in mu for alpha1 = alpha2, otherwise a dense scan of
// Re(u'(h) + nu u(h)) with bisection. For real lambda the expression is real; its imaginary
// part is kept as a diagnostic.
inline WellSpectrum solve_well(const WellPotential& w, int N, const WellOptions& opt = {}) {
    WellSpectrum out;
    out.search_lo = w.q_min();
    out.search_hi = std::min(w.alpha1, w.alpha2);
    if (!(out.search_hi > out.search_lo)) return out;
    if (w.alpha1 == w.alpha2) {
        const double shift = w.alpha1;
        auto pr = well_pair(w, N / 2 + 1, shift);
        auto s = dispersion_series_mu(pr, N);
        const double mu_max = std::sqrt(out.search_hi - out.search_lo);
        auto rep = find_roots(s, RootConstraint::real_interval(1e-12 * (1 + mu_max), mu_max * (1 + 1e-12)), opt.filter);
        out.discarded = rep.discarded;
        for (auto& r : rep.roots) {
            const double mu = r.lambda.real();
            out.eigenvalues.push_back(shift - mu * mu);
        }
        std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
        for (double l : out.eigenvalues) out.eigenfunctions.push_back(well_eigenfunction(w, pr, l, shift));
        return out;
    }
    WellDispersion E(w, N);
    const int n = opt.scan_points;
    const double lo = out.search_lo, hi = out.search_hi - 1e-12 * (1 + std::abs(out.search_hi));
    std::vector<double> xs(n + 1), fs(n + 1);
    parallel_for(n + 1, [&](int i) {
        xs[i] = lo + (hi - lo) * i / n;
        fs[i] = E(xs[i]).real();
    });
    auto f = [&](double x) { return E(x).real(); };
    for (int i = 0; i < n; ++i) {
        if (fs[i] == 0.0) {
            out.eigenvalues.push_back(xs[i]);
            continue;
        }
        if ((fs[i] < 0) == (fs[i + 1] < 0) || fs[i + 1] == 0.0) continue;
        double a = xs[i], b = xs[i + 1], fa = fs[i];
        for (int it = 0; it < 200 && b - a > 1e-15 * (1 + std::abs(a)); ++it) {
            double mid = 0.5 * (a + b), fm = f(mid);
            if ((fm < 0) == (fa < 0)) {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        out.eigenvalues.push_back(0.5 * (a + b));
    }
    if (fs[n] == 0.0) out.eigenvalues.push_back(xs[n]);
    for (double l : out.eigenvalues) out.eigenfunctions.push_back(well_eigenfunction(w, E.pair(), l));
    return out;
}

} // namespace spps

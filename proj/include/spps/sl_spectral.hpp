#pragma once

#include <memory>
#include <variant>

#include "spps/parallel.hpp"
#include "spps/rootfind.hpp"
#include "spps/spps_core.hpp"

namespace spps {

// u(a) cos(alpha) + u'(a) sin(alpha) = 0 (and likewise at b with beta).
struct BoundaryConditionUnmixed {
    double alpha = 0;
};

// beta1 u(b) - beta2 u'(b) = phi(lambda) (beta1p u(b) - beta2p u'(b)), phi given by its
// coefficients in powers of lambda.
struct BoundaryConditionLambda {
    cplx beta1 = 1.0, beta2 = 0.0, beta1p = 0.0, beta2p = 0.0;
    std::vector<cplx> phi;
};

struct SLProblem {
    SLCoefficients coeffs;
    BoundaryConditionUnmixed left;
    std::variant<BoundaryConditionUnmixed, BoundaryConditionLambda> right;
    RootConstraint search = RootConstraint::none();
};

namespace detail {

inline bool is_multiple_of_pi(double a) {
    double r = std::remainder(a, M_PI);
    return std::abs(r) < 1e-14;
}

inline SampledFunction reanchored(const SampledFunction& f, int idx) { return {with_anchor(f.grid, idx), f.values}; }

inline SLCoefficients anchored_at_left(const SLCoefficients& c) {
    if (c.grid().x0_index == 0) return c;
    return {reanchored(c.p, 0), reanchored(c.q, 0), reanchored(c.r, 0)};
}

// Coefficients of a polynomial in lambda re-expanded in powers of (lambda - c).
inline std::vector<cplx> taylor_shift(const std::vector<cplx>& poly, cplx c) {
    std::vector<cplx> a = poly;
    const int n = static_cast<int>(a.size());
    for (int i = 0; i < n; ++i)
        for (int j = n - 2; j >= i; --j) a[j] += c * a[j + 1];
    return a;
}

inline std::vector<cplx> poly_mul(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<cplx> r(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

inline bool is_real_function(const SampledFunction& f) { return f.max_abs_imag() <= 1e-14 * std::max(1.0, f.max_abs()); }

} // namespace detail

inline CharacteristicSeries characteristic_series_unmixed(const SLProblem& prob, const SppsSolutionPair& pr) {
    if (pr.grid().x0_index != 0) throw Error(ErrorCode::invalid_argument, "series needs the anchor at the left end");
    const auto* bc = std::get_if<BoundaryConditionUnmixed>(&prob.right);
    if (!bc) throw Error(ErrorCode::invalid_argument, "right boundary condition is lambda-dependent");
    const int b = pr.grid().m;
    const int N = pr.N;
    const cplx u0b = pr.particular.u0[b], u0pb = pr.particular.u0_prime[b], pb = pr.coeffs.p[b];
    const double cb = std::cos(bc->alpha), sb = std::sin(bc->alpha);
    const cplx lead = u0b * cb + u0pb * sb;
    const cplx flux = sb / (u0b * pb);
    std::vector<cplx> a(N + 1);
    if (detail::is_multiple_of_pi(prob.left.alpha)) {
        for (int k = 0; k <= N; ++k) a[k] = pr.x.members[2 * k + 1][b] * lead + flux * pr.x.members[2 * k][b];
    } else {
        const cplx u0a = pr.particular.u0[0], u0pa = pr.particular.u0_prime[0], pa = pr.coeffs.p[0];
        const cplx gamma = -u0a * pa * (u0a / std::tan(prob.left.alpha) + u0pa);
        for (int k = 0; k <= N; ++k) {
            cplx even = pr.xtilde.members[2 * k][b] + gamma * pr.x.members[2 * k + 1][b];
            cplx odd = (k == 0 ? cplx(0.0) : pr.xtilde.members[2 * k - 1][b]) + gamma * pr.x.members[2 * k][b];
            a[k] = lead * even + flux * odd;
        }
    }
    return make_series(pr.center, std::move(a));
}

inline CharacteristicSeries characteristic_series_lambda_bc(const SLProblem& prob, const SppsSolutionPair& pr) {
    if (!detail::is_multiple_of_pi(prob.left.alpha))
        throw Error(ErrorCode::unsupported_left_bc, "lambda-dependent right condition requires u(a) = 0");
    if (pr.grid().x0_index != 0) throw Error(ErrorCode::invalid_argument, "series needs the anchor at the left end");
    const auto* bc = std::get_if<BoundaryConditionLambda>(&prob.right);
    if (!bc) throw Error(ErrorCode::invalid_argument, "right boundary condition is not lambda-dependent");
    const int b = pr.grid().m;
    const int N = pr.N;
    auto phi = detail::taylor_shift(bc->phi.empty() ? std::vector<cplx>{0.0} : bc->phi, pr.center);
    std::vector<cplx> phi1(phi.size()), phi2(phi.size());
    for (size_t j = 0; j < phi.size(); ++j) {
        phi1[j] = -bc->beta1p * phi[j];
        phi2[j] = -bc->beta2p * phi[j];
    }
    phi1[0] += bc->beta1;
    phi2[0] += bc->beta2;
    const cplx u0b = pr.particular.u0[b], u0pb = pr.particular.u0_prime[b], pb = pr.coeffs.p[b];
    std::vector<cplx> A(phi.size()), B(phi.size());
    for (size_t j = 0; j < phi.size(); ++j) {
        A[j] = u0b * phi1[j] - u0pb * phi2[j];
        B[j] = phi2[j] / (u0b * pb);
    }
    std::vector<cplx> s1(N + 1), s0(N + 1);
    for (int k = 0; k <= N; ++k) {
        s1[k] = pr.x.members[2 * k + 1][b];
        s0[k] = pr.x.members[2 * k][b];
    }
    auto left = detail::poly_mul(A, s1);
    auto right = detail::poly_mul(B, s0);
    for (size_t k = 0; k < left.size(); ++k) left[k] -= right[k];
    while (left.size() > 2 && left.back() == cplx(0.0)) left.pop_back();
    return make_series(pr.center, std::move(left));
}

inline CharacteristicSeries characteristic_series(const SLProblem& prob, const SppsSolutionPair& pr) {
    if (std::holds_alternative<BoundaryConditionLambda>(prob.right)) return characteristic_series_lambda_bc(prob, pr);
    return characteristic_series_unmixed(prob, pr);
}

// Solution pair at center 0 for the problem's coefficients.
inline SppsSolutionPair center_pair(const SLProblem& prob, int N) {
    auto c = detail::anchored_at_left(prob.coeffs);
    return build_solution_pair(c, nonvanishing_u0(c), N);
}

inline CharacteristicSeries characteristic_series_unmixed(const SLProblem& prob, int N) {
    return characteristic_series_unmixed(prob, center_pair(prob, N));
}

inline CharacteristicSeries characteristic_series_lambda_bc(const SLProblem& prob, int N) {
    return characteristic_series_lambda_bc(prob, center_pair(prob, N));
}

// The solution satisfying the left condition: u2 for u(a) = 0, u1 + gamma u2 otherwise.
inline SolutionProfile eigenfunction(const SLProblem& prob, const SppsSolutionPair& pr, cplx lambda) {
    auto u2 = eval(pr, Which::u2, lambda);
    if (detail::is_multiple_of_pi(prob.left.alpha)) return u2;
    const cplx u0a = pr.particular.u0[0], u0pa = pr.particular.u0_prime[0], pa = pr.coeffs.p[0];
    const cplx gamma = -u0a * pa * (u0a / std::tan(prob.left.alpha) + u0pa);
    auto u1 = eval(pr, Which::u1, lambda);
    SolutionProfile out;
    out.value = add(u1.value, scale(u2.value, gamma));
    out.derivative = add(u1.derivative, scale(u2.derivative, gamma));
    out.tail = std::max(u1.tail, std::abs(gamma) * u2.tail);
    return out;
}

// Relative residuals of both boundary conditions for the eigenfunction at lambda.
inline std::pair<double, double> boundary_residuals(const SLProblem& prob, const SppsSolutionPair& pr, cplx lambda) {
    auto u = eigenfunction(prob, pr, lambda);
    const double sc = std::max(u.value.max_abs(), 1e-300);
    // A flat eigenfunction has derivative noise only; measure it against sc over the interval.
    const double scd = std::max({u.derivative.max_abs(), sc / (pr.grid().b - pr.grid().a), 1e-300});
    const int b = pr.grid().m;
    double ca = std::cos(prob.left.alpha), sa = std::sin(prob.left.alpha);
    double left = std::abs(u.value[0] * ca + u.derivative[0] * sa) / (std::abs(ca) * sc + std::abs(sa) * scd);
    double right;
    if (const auto* bc = std::get_if<BoundaryConditionUnmixed>(&prob.right)) {
        double cb = std::cos(bc->alpha), sb = std::sin(bc->alpha);
        right = std::abs(u.value[b] * cb + u.derivative[b] * sb) / (std::abs(cb) * sc + std::abs(sb) * scd);
    } else {
        const auto& l = std::get<BoundaryConditionLambda>(prob.right);
        cplx phi = 0.0, lk = 1.0;
        for (auto c : l.phi) {
            phi += c * lk;
            lk *= lambda;
        }
        cplx lhs = l.beta1 * u.value[b] - l.beta2 * u.derivative[b];
        cplx rhs = phi * (l.beta1p * u.value[b] - l.beta2p * u.derivative[b]);
        double s = (std::abs(l.beta1) + std::abs(phi * l.beta1p)) * sc + (std::abs(l.beta2) + std::abs(phi * l.beta2p)) * scd;
        right = std::abs(lhs - rhs) / std::max(s, 1e-300);
    }
    return {left, right};
}

// A nodeless solution at lambda_s assembled from the pair's u1, u2 there. For a real problem at
// a real point, two independent real solutions w_a, w_b combine into w_a + i w_b, which cannot
// vanish; otherwise a few complex combinations are tried. The best candidate must satisfy
// min|w| > 1e-6 max|w|.
inline ParticularSolution nodeless_combination(const SppsSolutionPair& pr, cplx lambda_s, bool real_problem) {
    auto a = eval(pr, Which::u1, lambda_s);
    auto b = eval(pr, Which::u2, lambda_s);
    struct Cand {
        SampledFunction v, d;
    };
    std::vector<Cand> basis;
    auto add_basis = [&](const SampledFunction& v, const SampledFunction& d) {
        double s = v.max_abs();
        if (s > 0) basis.push_back({scale(v, 1.0 / s), scale(d, 1.0 / s)});
    };
    std::vector<std::pair<SampledFunction, SampledFunction>> candidates;
    if (real_problem && std::abs(lambda_s.imag()) <= 1e-12 * (1 + std::abs(lambda_s))) {
        auto re = [](const SampledFunction& f) { return map(f, [](cplx v) { return cplx(v.real()); }); };
        auto im = [](const SampledFunction& f) { return map(f, [](cplx v) { return cplx(v.imag()); }); };
        add_basis(re(a.value), re(a.derivative));
        add_basis(im(a.value), im(a.derivative));
        add_basis(re(b.value), re(b.derivative));
        add_basis(im(b.value), im(b.derivative));
        for (size_t i = 0; i < basis.size(); ++i)
            for (size_t j = i + 1; j < basis.size(); ++j)
                candidates.emplace_back(add(basis[i].v, scale(basis[j].v, cplx(0, 1))),
                                        add(basis[i].d, scale(basis[j].d, cplx(0, 1))));
    }
    basis.clear();
    add_basis(a.value, a.derivative);
    add_basis(b.value, b.derivative);
    if (basis.size() == 2) {
        for (cplx c : {cplx(0, 1), cplx(0, -1), cplx(1, 0), cplx(-1, 0), std::polar(1.0, M_PI / 4), std::polar(1.0, -M_PI / 4)})
            candidates.emplace_back(add(basis[0].v, scale(basis[1].v, c)), add(basis[0].d, scale(basis[1].d, c)));
    }
    double best = -1;
    ParticularSolution out;
    for (auto& [v, d] : candidates) {
        double ratio = v.min_abs() / std::max(v.max_abs(), 1e-300);
        if (ratio > best) {
            best = ratio;
            double s = v.max_abs();
            out.u0 = scale(v, 1.0 / s);
            out.u0_prime = scale(d, 1.0 / s);
        }
    }
    if (best <= 1e-6)
        throw Error(ErrorCode::shift_failed_nodeless, "no nodeless combination at the shift center");
    out.lambda_center = lambda_s;
    return out;
}

// Integral of sqrt|r/p|: the phase length that sets how fast the series terms grow with |lambda|.
inline double oscillation_length(const SLCoefficients& c) {
    auto w = map(divide(c.r, c.p), [](cplx v) { return cplx(std::sqrt(std::abs(v))); });
    return std::abs(definite_integral(w));
}

// Nodeless solution at `target`, reached from `from` through intermediate centers spaced so that
// the series growth exp(sqrt|step| * L) stays below exp(max_growth). A single long jump would
// lose about that factor in relative accuracy.
inline ParticularSolution transported_particular(const SppsSolutionPair& from, cplx target, bool real_problem,
                                                 double max_growth = 8.0) {
    const double L = std::max(oscillation_length(from.coeffs), 1e-300);
    const double hop = (max_growth / L) * (max_growth / L);
    std::shared_ptr<const SppsSolutionPair> cur(&from, [](const SppsSolutionPair*) {});
    for (;;) {
        cplx delta = target - cur->center;
        cplx step = std::abs(delta) <= hop ? target : cur->center + delta / std::abs(delta) * hop;
        auto ps = nodeless_combination(*cur, step, real_problem);
        if (step == target) return ps;
        cur = std::make_shared<SppsSolutionPair>(build_solution_pair(cur->coeffs, ps, from.N));
    }
}

struct SolveOptions {
    RootFilterOptions filter;
    int homogeneous_order = 120;
    double max_growth = 8.0;
    double tol_bc = 1e-8; // relative boundary residual every reported eigenfunction must meet
};

inline bool is_real_problem(const SLProblem& prob) {
    const auto& c = prob.coeffs;
    if (!detail::is_real_function(c.p) || !detail::is_real_function(c.q) || !detail::is_real_function(c.r)) return false;
    if (const auto* l = std::get_if<BoundaryConditionLambda>(&prob.right)) {
        for (cplx v : {l->beta1, l->beta2, l->beta1p, l->beta2p})
            if (v.imag() != 0.0) return false;
        for (cplx v : l->phi)
            if (v.imag() != 0.0) return false;
    }
    return true;
}

// Roots from center 0, then up to `shifts` recentrings at the largest trusted root found so far.
inline SpectrumResult solve(const SLProblem& prob_in, int N, int shifts = 3, const SolveOptions& opt = {}) {
    SLProblem prob = prob_in;
    prob.coeffs = detail::anchored_at_left(prob_in.coeffs);
    const bool real = is_real_problem(prob);
    SpectrumResult res;
    res.N = N;
    std::vector<FoundRoot> all;
    std::vector<cplx> origin;
    std::vector<std::shared_ptr<SppsSolutionPair>> pairs;
    auto harvest = [&](const std::shared_ptr<SppsSolutionPair>& sp) {
        const auto& pr = *sp;
        pairs.push_back(sp);
        auto series = characteristic_series(prob, pr);
        auto rep = find_roots(series, prob.search, opt.filter);
        res.centers.push_back(pr.center);
        res.discarded.insert(res.discarded.end(), rep.discarded.begin(), rep.discarded.end());
        for (auto& r : rep.roots) {
            all.push_back(r);
            origin.push_back(pr.center);
        }
    };
    auto pr = std::make_shared<SppsSolutionPair>(
        build_solution_pair(prob.coeffs, nonvanishing_u0(prob.coeffs, opt.homogeneous_order), N));
    harvest(pr);
    for (int s = 0; s < shifts; ++s) {
        // Next center: the root with the largest real part not yet used as a center.
        std::optional<cplx> next;
        for (auto& r : all) {
            bool used = false;
            for (auto c : res.centers) used |= std::abs(c - r.lambda) <= 1e-6 * (1 + std::abs(r.lambda));
            if (used) continue;
            if (real && std::abs(r.lambda.imag()) > 1e-8 * (1 + std::abs(r.lambda))) continue;
            if (!next || r.lambda.real() > next->real()) next = r.lambda;
        }
        if (!next) break;
        cplx center = real ? cplx(next->real(), 0.0) : *next;
        try {
            auto ps = transported_particular(*pr, center, real, opt.max_growth);
            pr = std::make_shared<SppsSolutionPair>(build_solution_pair(prob.coeffs, ps, N));
            harvest(pr);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::shift_failed_nodeless) throw;
            res.warnings.push_back(e.what());
            res.centers.push_back(center);
        }
    }
    // Merge duplicates across centers: same root if closer than the merge tolerance or the
    // combined error estimates. The copy from the nearest center wins; its quadrature error is
    // smallest because u0 oscillates least there. The rounding estimate misses the loss from
    // distance to the center, so copies from different centers within the accepted relative
    // accuracy (max_error) also count as one root.
    std::vector<size_t> order(all.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return std::abs(all[a].lambda - origin[a]) < std::abs(all[b].lambda - origin[b]);
    });
    std::vector<Eigenvalue> kept;
    for (size_t idx : order) {
        const auto& r = all[idx];
        bool dup = false;
        for (auto& k : kept) {
            double tol = std::max(opt.filter.merge_tol * (1 + std::abs(r.lambda)), 10 * (r.error_estimate + k.error_estimate));
            if (k.center != origin[idx]) tol = std::max(tol, opt.filter.max_error * (1 + std::abs(r.lambda)));
            if (std::abs(k.lambda - r.lambda) <= tol) {
                dup = true;
                break;
            }
        }
        if (!dup) kept.push_back({r.lambda, r.residual, r.error_estimate, origin[idx], r.multiplicity});
    }
    // Every reported eigenfunction must satisfy both conditions; roots at the edge of a center's
    // reach can pass the series filters yet miss this.
    std::vector<double> bc_res(kept.size());
    parallel_for(static_cast<int>(kept.size()), [&](int i) {
        const SppsSolutionPair* src = nullptr;
        for (auto& p : pairs)
            if (p->center == kept[i].center) src = p.get();
        auto [l, r] = boundary_residuals(prob, *src, kept[i].lambda);
        bc_res[i] = std::max(l, r);
    });
    std::vector<Eigenvalue> verified;
    for (size_t i = 0; i < kept.size(); ++i) {
        if (bc_res[i] <= opt.tol_bc) {
            verified.push_back(kept[i]);
        } else {
            res.discarded.push_back({kept[i].lambda, DiscardReason::residual});
        }
    }
    kept = std::move(verified);
    std::sort(kept.begin(), kept.end(), [](const Eigenvalue& a, const Eigenvalue& b) {
        return a.lambda.real() < b.lambda.real() || (a.lambda.real() == b.lambda.real() && a.lambda.imag() < b.lambda.imag());
    });
    res.eigenvalues = std::move(kept);
    return res;
}

} // namespace spps

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "spps/grid.hpp"

namespace spps {

// Truncated Taylor series sum_k a_k (lambda - center)^k.
struct CharacteristicSeries {
    cplx center = 0.0;
    std::vector<cplx> coeffs;
    double trust_radius = std::numeric_limits<double>::infinity();

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }

    cplx operator()(cplx lambda) const {
        cplx z = lambda - center, acc = 0.0;
        for (int k = degree(); k >= 0; --k) acc = acc * z + coeffs[k];
        return acc;
    }
    cplx derivative(cplx lambda) const {
        cplx z = lambda - center, acc = 0.0;
        for (int k = degree(); k >= 1; --k) acc = acc * z + double(k) * coeffs[k];
        return acc;
    }
    // sum_k |a_k| |lambda - center|^k, the natural scale of a value of the series.
    double magnitude(cplx lambda) const {
        double z = std::abs(lambda - center), acc = 0.0;
        for (int k = degree(); k >= 0; --k) acc = acc * z + std::abs(coeffs[k]);
        return acc;
    }
    CharacteristicSeries truncated(int n) const {
        CharacteristicSeries s = *this;
        s.coeffs.resize(std::clamp(n + 1, 1, degree() + 1));
        return s;
    }
};

// Largest rho with |a_N| rho^N < tol * max_k |a_k| rho^k. The ratio is nondecreasing in rho,
// so bisection on log(rho) applies.
inline double default_trust_radius(const std::vector<cplx>& a, double tol = 1e-10) {
    const int N = static_cast<int>(a.size()) - 1;
    if (N < 1) return 0.0;
    const double aN = std::abs(a[N]);
    if (aN == 0.0) return std::numeric_limits<double>::infinity();
    std::vector<double> la(N + 1);
    for (int k = 0; k <= N; ++k) la[k] = a[k] == cplx(0.0) ? -INFINITY : std::log(std::abs(a[k]));
    auto log_ratio = [&](double t) {
        double mx = -INFINITY;
        for (int k = 0; k <= N; ++k) mx = std::max(mx, la[k] + k * t);
        return la[N] + N * t - mx;
    };
    const double lt = std::log(tol);
    double lo = -700.0 / N, hi = 700.0 / N;
    if (log_ratio(hi) < lt) return std::exp(hi);
    if (log_ratio(lo) >= lt) return std::exp(lo);
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (log_ratio(mid) < lt ? lo : hi) = mid;
    }
    return std::exp(lo);
}

inline CharacteristicSeries make_series(cplx center, std::vector<cplx> coeffs, double tail_tol = 1e-10) {
    for (auto& c : coeffs)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw Error(ErrorCode::degenerate_series, "nonfinite coefficient");
    CharacteristicSeries s;
    s.center = center;
    s.trust_radius = default_trust_radius(coeffs, tail_tol);
    s.coeffs = std::move(coeffs);
    return s;
}

// An exact polynomial: no truncation, unbounded trust.
inline CharacteristicSeries make_polynomial(cplx center, std::vector<cplx> coeffs) {
    CharacteristicSeries s;
    s.center = center;
    s.coeffs = std::move(coeffs);
    return s;
}

namespace detail {

// Parlett-Reinsch diagonal similarity balancing, radix 2.
inline void balance(Eigen::MatrixXcd& A) {
    const int n = static_cast<int>(A.rows());
    auto nrm = [](cplx v) { return std::abs(v.real()) + std::abs(v.imag()); };
    bool done = false;
    for (int sweep = 0; !done && sweep < 200; ++sweep) {
        done = true;
        for (int i = 0; i < n; ++i) {
            double c = 0, r = 0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                c += nrm(A(j, i));
                r += nrm(A(i, j));
            }
            if (c == 0 || r == 0) continue;
            double g = r / 2, f = 1, s = c + r;
            while (c < g) {
                f *= 2;
                c *= 4;
            }
            g = r * 2;
            while (c > g) {
                f /= 2;
                c /= 4;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                A.row(i) /= f;
                A.col(i) *= f;
            }
        }
    }
}

} // namespace detail

// All roots of the series polynomial via balanced companion-matrix eigenvalues.
inline std::vector<cplx> polynomial_roots(const CharacteristicSeries& s) {
    double mx = 0;
    for (auto& c : s.coeffs) mx = std::max(mx, std::abs(c));
    if (!(mx >= 1e-300)) throw Error(ErrorCode::degenerate_series, "all coefficients below 1e-300");
    std::vector<cplx> a = s.coeffs;
    while (!a.empty() && std::abs(a.back()) < 1e-300) a.pop_back();
    std::vector<cplx> roots;
    int lead = 0;
    while (lead < static_cast<int>(a.size()) && a[lead] == cplx(0.0)) ++lead;
    for (int i = 0; i < lead; ++i) roots.push_back(s.center);
    a.erase(a.begin(), a.begin() + lead);
    // Trailing terms negligible on the trust disk only add noise roots and wreck the scaling.
    if (std::isfinite(s.trust_radius) && s.trust_radius > 0) {
        const double lr = std::log(s.trust_radius);
        double top = -INFINITY;
        std::vector<double> lt(a.size());
        for (size_t k = 0; k < a.size(); ++k) {
            lt[k] = a[k] == cplx(0.0) ? -INFINITY : std::log(std::abs(a[k])) + k * lr;
            top = std::max(top, lt[k]);
        }
        while (a.size() > 2 && lt[a.size() - 1] < top + std::log(1e-20)) a.pop_back();
    }
    const int d = static_cast<int>(a.size()) - 1;
    if (d < 1) return roots;
    // Substitute z = sigma t so that |b_0| = |b_d| before forming the companion matrix.
    const double log_sigma = (std::log(std::abs(a[0])) - std::log(std::abs(a[d]))) / d;
    std::vector<cplx> b(d + 1);
    std::vector<double> lb(d + 1);
    double lmax = -INFINITY;
    for (int k = 0; k <= d; ++k) {
        lb[k] = a[k] == cplx(0.0) ? -INFINITY : std::log(std::abs(a[k])) + k * log_sigma;
        lmax = std::max(lmax, lb[k]);
    }
    for (int k = 0; k <= d; ++k)
        b[k] = a[k] == cplx(0.0) ? cplx(0.0) : (a[k] / std::abs(a[k])) * std::exp(lb[k] - lmax);
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(d, d);
    for (int j = 0; j < d; ++j) C(0, j) = -b[d - 1 - j] / b[d];
    for (int i = 1; i < d; ++i) C(i, i - 1) = 1.0;
    Eigen::MatrixXcd Cb = C;
    detail::balance(Cb);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es;
    es.setMaxIterations(200 * d);
    es.compute(Cb, false);
    if (es.info() != Eigen::Success) es.compute(C, false);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::no_convergence, "companion eigenvalue solver failed");
    const double sigma = std::exp(log_sigma);
    for (int i = 0; i < d; ++i) roots.push_back(s.center + sigma * es.eigenvalues()[i]);
    return roots;
}

struct NewtonOptions {
    double step_tol = 1e-14;
    int max_iter = 40;
    // Accept a non-terminated iteration when the best residual is at this relative level.
    double accept_residual = 1e-10;
};

inline cplx refine_newton(const CharacteristicSeries& s, cplx lambda0, const NewtonOptions& opt = {}) {
    cplx x = lambda0, best = lambda0;
    double best_res = INFINITY;
    for (int it = 0; it < opt.max_iter; ++it) {
        cplx f = s(x), df = s.derivative(x);
        double res = std::abs(f) / std::max(s.magnitude(x), 1e-300);
        if (res < best_res) {
            best_res = res;
            best = x;
        }
        if (f == cplx(0.0)) return x;
        if (df == cplx(0.0) || !std::isfinite(std::abs(df))) break;
        cplx dx = f / df;
        x -= dx;
        if (!std::isfinite(std::abs(x))) break;
        if (std::abs(dx) < opt.step_tol * (1 + std::abs(x))) return x;
    }
    double res = std::abs(s(x)) / std::max(s.magnitude(x), 1e-300);
    if (res < best_res) {
        best_res = res;
        best = x;
    }
    if (best_res < opt.accept_residual) return best;
    throw Error(ErrorCode::no_convergence, "Newton iteration did not converge");
}

struct RootConstraint {
    enum class Kind { none, half_plane, interval, disk } kind = Kind::none;
    double threshold = 0;                    // half_plane: Re(lambda) > threshold
    double lo = -INFINITY, hi = INFINITY;    // interval on the real axis
    double imag_tol = 1e-8;                  // interval: |Im| <= imag_tol (1 + |lambda|)
    cplx disk_center = 0.0;
    double radius = INFINITY;

    static RootConstraint none() { return {}; }
    static RootConstraint right_half_plane(double t = 0) {
        RootConstraint c;
        c.kind = Kind::half_plane;
        c.threshold = t;
        return c;
    }
    static RootConstraint real_interval(double lo, double hi, double imag_tol = 1e-8) {
        RootConstraint c;
        c.kind = Kind::interval;
        c.lo = lo;
        c.hi = hi;
        c.imag_tol = imag_tol;
        return c;
    }
    static RootConstraint disk(cplx center, double r) {
        RootConstraint c;
        c.kind = Kind::disk;
        c.disk_center = center;
        c.radius = r;
        return c;
    }

    bool admits(cplx z) const {
        switch (kind) {
        case Kind::none: return true;
        case Kind::half_plane: return z.real() > threshold;
        case Kind::interval:
            return z.real() >= lo && z.real() <= hi && std::abs(z.imag()) <= imag_tol * (1 + std::abs(z));
        case Kind::disk: return std::abs(z - disk_center) <= radius;
        }
        return true;
    }
};

enum class DiscardReason { constraint, out_of_trust, residual, truncation_unstable, noise_limited, no_convergence };

inline const char* to_string(DiscardReason r) {
    switch (r) {
    case DiscardReason::constraint: return "constraint";
    case DiscardReason::out_of_trust: return "out_of_trust";
    case DiscardReason::residual: return "residual";
    case DiscardReason::truncation_unstable: return "truncation_unstable";
    case DiscardReason::noise_limited: return "noise_limited";
    case DiscardReason::no_convergence: return "no_convergence";
    }
    return "unknown";
}

struct FoundRoot {
    cplx lambda;
    double residual = 0;
    bool stable = true;
    double error_estimate = 0; // rounding-level error bound from the series condition number
    int multiplicity = 1;
};

struct DiscardedRoot {
    cplx lambda;
    DiscardReason reason;
};

struct RootReport {
    std::vector<FoundRoot> roots;
    std::vector<DiscardedRoot> discarded;
};

struct RootFilterOptions {
    double tol_res = 1e-8;
    double tol_stab = 1e-6;      // relative movement allowed under truncation N -> N - ceil(N/6)
    double noise = 2.2e-16;      // relative accuracy assumed for coefficient-weighted sums
    double max_error = 1e-6;     // relative error-estimate ceiling
    double merge_tol = 1e-8;     // relative distance below which roots are merged
    int scan_intervals = 512;
};

// Rounding-level error estimate noise * sum|a_k z^k| / |kappa'(lambda)|.
inline double root_error_estimate(const CharacteristicSeries& s, cplx lambda, double noise) {
    double d = std::abs(s.derivative(lambda));
    return d > 0 ? noise * s.magnitude(lambda) / d : INFINITY;
}

inline RootReport filter_roots(const CharacteristicSeries& s, const std::vector<cplx>& raw,
                               const RootConstraint& constraint, const RootFilterOptions& opt = {}) {
    RootReport rep;
    const int N = s.degree();
    const auto coarse = s.truncated(N - (N + 5) / 6);
    for (cplx z : raw) {
        if (!constraint.admits(z)) {
            rep.discarded.push_back({z, DiscardReason::constraint});
            continue;
        }
        if (std::abs(z - s.center) > s.trust_radius) {
            rep.discarded.push_back({z, DiscardReason::out_of_trust});
            continue;
        }
        // Next to the center the magnitude is small while the slope is not, so the rounding of
        // lambda itself can leave |kappa| above tol_res * magnitude; allow a few ulps of lambda.
        const double mag = std::max(s.magnitude(z), 1e-300);
        const double ulp_floor = 4 * std::numeric_limits<double>::epsilon() * std::abs(z) * std::abs(s.derivative(z));
        double res = std::abs(s(z)) / mag;
        if (std::abs(s(z)) > opt.tol_res * mag + ulp_floor) {
            rep.discarded.push_back({z, DiscardReason::residual});
            continue;
        }
        bool stable = true;
        if (N >= 2 && std::isfinite(s.trust_radius)) {
            try {
                NewtonOptions no;
                no.accept_residual = 1e-6;
                cplx moved = refine_newton(coarse, z, no);
                stable = std::abs(moved - z) <= opt.tol_stab * (1 + std::abs(z));
            } catch (const Error&) {
                stable = false;
            }
        }
        if (!stable) {
            rep.discarded.push_back({z, DiscardReason::truncation_unstable});
            continue;
        }
        double err = root_error_estimate(s, z, opt.noise);
        if (err > opt.max_error * (1 + std::abs(z))) {
            rep.discarded.push_back({z, DiscardReason::noise_limited});
            continue;
        }
        rep.roots.push_back({z, res, true, err, 1});
    }
    return rep;
}

// Bisection on sign changes of a real function over n equal subintervals of [lo, hi].
inline std::vector<double> sign_scan_roots(const std::function<double(double)>& f, double lo, double hi, int n = 512,
                                           double xtol = 1e-15) {
    std::vector<double> out;
    if (!(hi > lo)) return out;
    double x0 = lo, f0 = f(lo);
    for (int i = 1; i <= n; ++i) {
        double x1 = lo + (hi - lo) * i / n, f1 = f(x1);
        if (f0 == 0.0) {
            out.push_back(x0);
        } else if ((f0 < 0) != (f1 < 0) && f1 != 0.0) {
            double a = x0, b = x1, fa = f0;
            for (int it = 0; it < 200 && (b - a) > xtol * (1 + std::abs(a)); ++it) {
                double c = 0.5 * (a + b), fc = f(c);
                if ((fc < 0) == (fa < 0)) {
                    a = c;
                    fa = fc;
                } else {
                    b = c;
                }
            }
            out.push_back(0.5 * (a + b));
        }
        x0 = x1;
        f0 = f1;
    }
    if (f0 == 0.0) out.push_back(x0);
    return out;
}

// Merge roots closer than merge_tol (1 + |lambda|), keeping the best-conditioned copy.
inline std::vector<FoundRoot> merge_roots(std::vector<FoundRoot> roots, double merge_tol) {
    std::sort(roots.begin(), roots.end(), [](const FoundRoot& a, const FoundRoot& b) {
        return a.lambda.real() < b.lambda.real() ||
               (a.lambda.real() == b.lambda.real() && a.lambda.imag() < b.lambda.imag());
    });
    std::vector<FoundRoot> out;
    for (auto& r : roots) {
        bool merged = false;
        for (auto& o : out) {
            if (std::abs(o.lambda - r.lambda) <= merge_tol * (1 + std::abs(r.lambda))) {
                o.multiplicity += r.multiplicity;
                if (r.error_estimate < o.error_estimate) {
                    int mult = o.multiplicity;
                    o = r;
                    o.multiplicity = mult;
                }
                merged = true;
                break;
            }
        }
        if (!merged) out.push_back(r);
    }
    return out;
}

// Companion roots, Newton polish, optional real sign scan, filtering and merging.
inline RootReport find_roots(const CharacteristicSeries& s, const RootConstraint& constraint,
                             const RootFilterOptions& opt = {}) {
    std::vector<cplx> raw = polynomial_roots(s);
    std::vector<cplx> polished;
    RootReport rep;
    for (cplx z : raw) {
        if (!std::isfinite(std::abs(z)) || std::abs(z - s.center) > 2 * s.trust_radius) {
            rep.discarded.push_back({z, DiscardReason::out_of_trust});
            continue;
        }
        try {
            polished.push_back(refine_newton(s, z));
        } catch (const Error&) {
            rep.discarded.push_back({z, DiscardReason::no_convergence});
        }
    }
    if (constraint.kind == RootConstraint::Kind::interval) {
        double lo = std::max(constraint.lo, s.center.real() - s.trust_radius);
        double hi = std::min(constraint.hi, s.center.real() + s.trust_radius);
        if (std::isfinite(lo) && std::isfinite(hi)) {
            // A real problem gives kappa = (constant phase) * (real function) on the axis;
            // rotate by the phase of the largest sampled value before scanning.
            cplx phase = 1.0;
            double big = 0;
            for (int i = 0; i <= 16; ++i) {
                cplx v = s(cplx(lo + (hi - lo) * i / 16.0, 0.0));
                if (std::abs(v) > big) {
                    big = std::abs(v);
                    phase = v / std::abs(v);
                }
            }
            auto re = [&](double x) { return (s(cplx(x, 0.0)) / phase).real(); };
            for (double x : sign_scan_roots(re, lo, hi, opt.scan_intervals)) {
                try {
                    polished.push_back(refine_newton(s, cplx(x, 0.0)));
                } catch (const Error&) {
                    polished.push_back(cplx(x, 0.0));
                }
            }
        }
    }
    auto f = filter_roots(s, polished, constraint, opt);
    rep.discarded.insert(rep.discarded.end(), f.discarded.begin(), f.discarded.end());
    rep.roots = merge_roots(std::move(f.roots), opt.merge_tol);
    return rep;
}

struct Eigenvalue {
    cplx lambda;
    double residual = 0;
    double error_estimate = 0;
    cplx center = 0.0; // expansion center that produced this value
    int multiplicity = 1;
};

struct SpectrumResult {
    std::vector<Eigenvalue> eigenvalues;
    int N = 0;
    std::vector<cplx> centers;
    std::vector<std::string> warnings;
    std::vector<DiscardedRoot> discarded;
};

} // namespace spps

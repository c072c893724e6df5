#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "spps/error.hpp"

namespace spps {

using cplx = std::complex<double>;

namespace detail {

// Neumaier-compensated accumulator, applied to real and imaginary parts separately.
class CompensatedSum {
public:
    void add(cplx v) {
        add_part(sum_re_, c_re_, v.real());
        add_part(sum_im_, c_im_, v.imag());
    }
    cplx value() const { return {sum_re_ + c_re_, sum_im_ + c_im_}; }

private:
    static void add_part(double& s, double& c, double v) {
        double t = s + v;
        if (std::abs(s) >= std::abs(v))
            c += (s - t) + v;
        else
            c += (v - t) + s;
        s = t;
    }
    double sum_re_ = 0, c_re_ = 0, sum_im_ = 0, c_im_ = 0;
};

} // namespace detail

struct Grid {
    double a = 0;
    double b = 1;
    int m = 8;
    int x0_index = 0;
    double snap_distance = 0;

    double h() const { return (b - a) / m; }
    double node(int i) const { return i == m ? b : a + i * h(); }
    double x0() const { return node(x0_index); }
    int size() const { return m + 1; }

    friend bool operator==(const Grid& l, const Grid& r) {
        return l.a == r.a && l.b == r.b && l.m == r.m && l.x0_index == r.x0_index;
    }
};

inline Grid make_grid(double a, double b, int m, double x0) {
    if (!(a < b)) throw Error(ErrorCode::invalid_interval, "require a < b");
    if (m < 8) throw Error(ErrorCode::grid_too_coarse, "require m >= 8, got " + std::to_string(m));
    if (!(x0 >= a && x0 <= b)) throw Error(ErrorCode::invalid_interval, "x0 outside [a,b]");
    Grid g{a, b, m, 0, 0.0};
    int idx = static_cast<int>(std::lround((x0 - a) / g.h()));
    g.x0_index = std::clamp(idx, 0, m);
    g.snap_distance = std::abs(g.node(g.x0_index) - x0);
    return g;
}

// Grid with the same nodes and a different anchor.
inline Grid with_anchor(Grid g, int x0_index) {
    if (x0_index < 0 || x0_index > g.m) throw Error(ErrorCode::invalid_argument, "anchor index outside grid");
    g.x0_index = x0_index;
    g.snap_distance = 0;
    return g;
}

struct SampledFunction {
    Grid grid;
    std::vector<cplx> values;

    SampledFunction() = default;
    explicit SampledFunction(const Grid& g, cplx fill = 0.0) : grid(g), values(g.m + 1, fill) {}
    SampledFunction(const Grid& g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
        if (static_cast<int>(values.size()) != g.m + 1)
            throw Error(ErrorCode::grid_mismatch, "sample count does not match grid");
    }

    int size() const { return static_cast<int>(values.size()); }
    cplx& operator[](int i) { return values[i]; }
    const cplx& operator[](int i) const { return values[i]; }
    cplx front() const { return values.front(); }
    cplx back() const { return values.back(); }
    cplx at_anchor() const { return values[grid.x0_index]; }

    double max_abs() const {
        double r = 0;
        for (auto& v : values) r = std::max(r, std::abs(v));
        return r;
    }
    double min_abs() const {
        double r = INFINITY;
        for (auto& v : values) r = std::min(r, std::abs(v));
        return r;
    }
    double max_abs_imag() const {
        double r = 0;
        for (auto& v : values) r = std::max(r, std::abs(v.imag()));
        return r;
    }
};

template <class F>
SampledFunction sample(const Grid& g, F&& f) {
    SampledFunction out(g);
    for (int i = 0; i <= g.m; ++i) {
        cplx v = cplx(f(g.node(i)));
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw Error(ErrorCode::nonfinite_sample, "sample not finite at node " + std::to_string(i), i);
        out[i] = v;
    }
    return out;
}

inline SampledFunction constant(const Grid& g, cplx c) { return SampledFunction(g, c); }

// Applies fn to every value; fn may be any callable cplx -> cplx.
template <class F>
SampledFunction map(const SampledFunction& f, F&& fn) {
    SampledFunction out(f.grid);
    for (int i = 0; i < f.size(); ++i) out[i] = fn(f[i]);
    return out;
}

enum class PointwiseOp { multiply, divide, add, scale, reciprocal };

namespace detail {
inline void require_same(const SampledFunction& f, const SampledFunction& g) {
    if (!(f.grid == g.grid) || f.size() != g.size())
        throw Error(ErrorCode::grid_mismatch, "operands live on different grids");
}
inline cplx checked_inverse(cplx d, int i) {
    if (d == cplx(0.0)) throw Error(ErrorCode::division_by_zero, "zero denominator at node " + std::to_string(i), i);
    return 1.0 / d;
}
} // namespace detail

inline SampledFunction multiply(const SampledFunction& f, const SampledFunction& g) {
    detail::require_same(f, g);
    SampledFunction out(f.grid);
    for (int i = 0; i < f.size(); ++i) out[i] = f[i] * g[i];
    return out;
}

inline SampledFunction divide(const SampledFunction& f, const SampledFunction& g) {
    detail::require_same(f, g);
    SampledFunction out(f.grid);
    for (int i = 0; i < f.size(); ++i) out[i] = f[i] * detail::checked_inverse(g[i], i);
    return out;
}

inline SampledFunction add(const SampledFunction& f, const SampledFunction& g) {
    detail::require_same(f, g);
    SampledFunction out(f.grid);
    for (int i = 0; i < f.size(); ++i) out[i] = f[i] + g[i];
    return out;
}

inline SampledFunction scale(const SampledFunction& f, cplx c) {
    return map(f, [c](cplx v) { return c * v; });
}

inline SampledFunction reciprocal(const SampledFunction& f) {
    SampledFunction out(f.grid);
    for (int i = 0; i < f.size(); ++i) out[i] = detail::checked_inverse(f[i], i);
    return out;
}

// Op-dispatched form; the scalar is used by `scale` only.
inline SampledFunction pointwise(PointwiseOp op, const SampledFunction& f, const SampledFunction* g = nullptr,
                                 cplx scalar = 1.0) {
    auto need = [&]() -> const SampledFunction& {
        if (!g) throw Error(ErrorCode::invalid_argument, "binary pointwise op needs a second operand");
        return *g;
    };
    switch (op) {
    case PointwiseOp::multiply: return multiply(f, need());
    case PointwiseOp::divide: return divide(f, need());
    case PointwiseOp::add: return add(f, need());
    case PointwiseOp::scale: return scale(f, scalar);
    case PointwiseOp::reciprocal: return reciprocal(f);
    }
    return f;
}

enum class Quadrature { spline, simpson };

namespace detail {

// Second derivatives of the not-a-knot cubic spline through (x_i, f_i) on a uniform grid.
// The end conditions collapse the first and last interior equations to 6 M = rhs, so the
// remaining system is the constant (1,4,1) tridiagonal one.
inline std::vector<double> spline_moments(const std::vector<double>& f, double h) {
    const int m = static_cast<int>(f.size()) - 1;
    std::vector<double> M(m + 1, 0.0), rhs(m + 1, 0.0);
    const double s = 6.0 / (h * h);
    for (int i = 1; i < m; ++i) rhs[i] = s * (f[i - 1] - 2.0 * f[i] + f[i + 1]);
    M[1] = rhs[1] / 6.0;
    M[m - 1] = rhs[m - 1] / 6.0;
    const int lo = 2, hi = m - 2;
    if (hi >= lo) {
        const int n = hi - lo + 1;
        std::vector<double> c(n), d(n);
        for (int k = 0; k < n; ++k) {
            int i = lo + k;
            double r = rhs[i];
            if (i == lo) r -= M[1];
            if (i == hi) r -= M[m - 1];
            if (k == 0) {
                c[k] = 1.0 / 4.0;
                d[k] = r / 4.0;
            } else {
                double den = 4.0 - c[k - 1];
                c[k] = 1.0 / den;
                d[k] = (r - d[k - 1]) / den;
            }
        }
        M[hi] = d[n - 1];
        for (int k = n - 2; k >= 0; --k) M[lo + k] = d[k] - c[k] * M[lo + k + 1];
    }
    M[0] = 2.0 * M[1] - M[2];
    M[m] = 2.0 * M[m - 1] - M[m - 2];
    return M;
}

inline std::vector<double> segment_integrals_spline(const std::vector<double>& f, double h) {
    const int m = static_cast<int>(f.size()) - 1;
    auto M = spline_moments(f, h);
    std::vector<double> seg(m);
    const double h3 = h * h * h / 24.0;
    for (int i = 0; i < m; ++i) seg[i] = 0.5 * h * (f[i] + f[i + 1]) - h3 * (M[i] + M[i + 1]);
    return seg;
}

// Single-segment integral of the cubic through four neighbouring nodes.
inline double cubic_segment(const std::vector<double>& f, int i, double h) {
    const int m = static_cast<int>(f.size()) - 1;
    if (i >= 1 && i + 2 <= m) return h / 24.0 * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]);
    if (i == 0) return h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
    return h / 24.0 * (f[m - 3] - 5.0 * f[m - 2] + 19.0 * f[m - 1] + 9.0 * f[m]);
}

inline std::vector<double> cumulative_real(const std::vector<double>& f, double h, int x0, Quadrature rule) {
    const int m = static_cast<int>(f.size()) - 1;
    std::vector<double> F(m + 1, 0.0);
    auto accumulate = [&](const std::vector<double>& seg) {
        double s = 0, c = 0;
        for (int i = x0; i < m; ++i) {
            double v = seg[i], t = s + v;
            c += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
            s = t;
            F[i + 1] = s + c;
        }
        s = 0, c = 0;
        for (int i = x0 - 1; i >= 0; --i) {
            double v = -seg[i], t = s + v;
            c += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
            s = t;
            F[i] = s + c;
        }
    };
    if (rule == Quadrature::spline) {
        accumulate(segment_integrals_spline(f, h));
        return F;
    }
    // Simpson over node pairs measured from the anchor; an odd remainder takes one cubic segment.
    F[x0] = 0;
    for (int dir : {+1, -1}) {
        double s = 0;
        for (int j = 2; x0 + dir * j >= 0 && x0 + dir * j <= m; j += 2) {
            int i0 = x0 + dir * (j - 2), i1 = x0 + dir * (j - 1), i2 = x0 + dir * j;
            s += dir * h / 3.0 * (f[i0] + 4.0 * f[i1] + f[i2]);
            F[i2] = s;
        }
        for (int j = 1; x0 + dir * j >= 0 && x0 + dir * j <= m; j += 2) {
            int prev = x0 + dir * (j - 1), cur = x0 + dir * j;
            int seg = std::min(prev, cur);
            F[cur] = F[prev] + dir * cubic_segment(f, seg, h);
        }
    }
    return F;
}

inline void split(const SampledFunction& f, std::vector<double>& re, std::vector<double>& im) {
    re.resize(f.size());
    im.resize(f.size());
    for (int i = 0; i < f.size(); ++i) {
        re[i] = f[i].real();
        im[i] = f[i].imag();
    }
}

inline bool is_real(const std::vector<double>& im) {
    return std::all_of(im.begin(), im.end(), [](double v) { return v == 0.0; });
}

} // namespace detail

// F(x_i) = integral from x0 to x_i of the piecewise cubic interpolant of f.
inline SampledFunction cumulative_integral(const SampledFunction& f, Quadrature rule = Quadrature::spline) {
    std::vector<double> re, im;
    detail::split(f, re, im);
    const double h = f.grid.h();
    auto Fr = detail::cumulative_real(re, h, f.grid.x0_index, rule);
    SampledFunction out(f.grid);
    if (detail::is_real(im)) {
        for (int i = 0; i < f.size(); ++i) out[i] = Fr[i];
    } else {
        auto Fi = detail::cumulative_real(im, h, f.grid.x0_index, rule);
        for (int i = 0; i < f.size(); ++i) out[i] = cplx(Fr[i], Fi[i]);
    }
    out[f.grid.x0_index] = 0.0;
    return out;
}

// Integral over the whole interval [a, b].
inline cplx definite_integral(const SampledFunction& f) {
    auto F = cumulative_integral(f);
    return F.back() - F.front();
}

// First or second derivative of the not-a-knot spline interpolant at the nodes.
inline SampledFunction spline_derivative(const SampledFunction& f, int order = 1) {
    if (order != 1 && order != 2) throw Error(ErrorCode::invalid_argument, "derivative order must be 1 or 2");
    std::vector<double> parts[2];
    detail::split(f, parts[0], parts[1]);
    const double h = f.grid.h();
    const int m = f.grid.m;
    std::vector<double> out[2];
    for (int c = 0; c < 2; ++c) {
        const auto& y = parts[c];
        auto M = detail::spline_moments(y, h);
        out[c].resize(m + 1);
        if (order == 2) {
            out[c] = M;
            continue;
        }
        for (int i = 0; i < m; ++i) out[c][i] = (y[i + 1] - y[i]) / h - h * (2.0 * M[i] + M[i + 1]) / 6.0;
        out[c][m] = (y[m] - y[m - 1]) / h + h * (M[m - 1] + 2.0 * M[m]) / 6.0;
    }
    SampledFunction r(f.grid);
    for (int i = 0; i <= m; ++i) r[i] = cplx(out[0][i], out[1][i]);
    return r;
}

// Spline value at an arbitrary point of [a, b].
inline cplx interpolate(const SampledFunction& f, double x) {
    const Grid& g = f.grid;
    const double h = g.h();
    double t = (x - g.a) / h;
    int i = std::clamp(static_cast<int>(std::floor(t)), 0, g.m - 1);
    double s = x - g.node(i), u = g.node(i + 1) - x;
    std::vector<double> parts[2];
    detail::split(f, parts[0], parts[1]);
    double res[2];
    for (int c = 0; c < 2; ++c) {
        auto M = detail::spline_moments(parts[c], h);
        const auto& y = parts[c];
        res[c] = M[i] * u * u * u / (6 * h) + M[i + 1] * s * s * s / (6 * h) + (y[i] / h - M[i] * h / 6) * u +
                 (y[i + 1] / h - M[i + 1] * h / 6) * s;
    }
    return {res[0], res[1]};
}

} // namespace spps

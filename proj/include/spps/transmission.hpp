#pragma once

#include "spps/parallel.hpp"
#include "spps/sl_spectral.hpp"

namespace spps {

enum class Polarization { s, p };

// Index n1 for x < 0, n(x) on [0, d], n2 for x > d.
struct LayerProfile {
    double n1 = 1, n2 = 1;
    SampledFunction n;
    Polarization pol = Polarization::s;

    double d() const { return n.grid.b - n.grid.a; }
};

inline LayerProfile make_layer(double n1, double n2, SampledFunction n, Polarization pol) {
    if (!(n1 > 0) || !(n2 > 0)) throw Error(ErrorCode::invalid_argument, "outer indices must be positive");
    detail::require_real(n, "n");
    for (int i = 0; i < n.size(); ++i)
        if (!(n[i].real() > 0)) throw Error(ErrorCode::invalid_argument, "index must be positive", i);
    return {n1, n2, detail::reanchored(n, 0), pol};
}

struct PlaneWaveQuery {
    double k = 1;     // free-space wavenumber
    double theta = 0; // incidence angle in the ambient medium
    double beta(double n1) const { return k * n1 * std::sin(theta); }
};

struct RTResult {
    double theta = 0;
    cplx R = 0.0, T = 0.0;
    double energy_check = 0;   // |R|^2 + n2 |T|^2 / n1, equal to 1 at normal incidence
    double energy_oblique = 0; // flux balance for any angle, reported only
    double wronskian = 0;      // |p (y1 y2' - y1' y2)| at d
    bool evanescent = false;
};

// Values of y1, y2 and the fluxes p y' at x = d for one beta^2.
struct LayerBoundary {
    cplx y1, F1, y2, F2;
};

// SL form (P y')' + Q y = lambda R y with lambda = beta^2:
// s: P = 1, Q = k^2 n^2, R = 1;  p: P = 1/n^2, Q = k^2, R = 1/n^2.
inline SLCoefficients layer_coefficients(const LayerProfile& L, double k) {
    const Grid& g = L.n.grid;
    auto n2 = multiply(L.n, L.n);
    if (L.pol == Polarization::s) return make_sl_coefficients(constant(g, 1.0), scale(n2, k * k), constant(g, 1.0));
    auto inv = reciprocal(n2);
    return make_sl_coefficients(inv, constant(g, k * k), inv);
}

// y1(0)=1, y1'(0)=0, y2(0)=0, P y2'(0)=1 for every beta from a single set of formal powers.
// The particular solution starts as exp(i k n0 x), which keeps its modulus away from zero.
class LayerSolutions {
  public:
    LayerSolutions(const LayerProfile& L, double k, int N, int homogeneous_order = 120)
        : L_(L), k_(k), slope_(cplx(0.0, k * L.n[0].real())), pair_(build(L, k, slope_, N, homogeneous_order)) {}

    LayerBoundary at(double beta2) const {
        const int m = pair_.grid().m;
        auto a = eval_at(pair_, Which::u1, beta2, m);
        auto b = eval_at(pair_, Which::u2, beta2, m);
        const cplx p0 = pair_.coeffs.p[0], pd = pair_.coeffs.p[m];
        const cplx c = -slope_ * p0;
        return {a.value + c * b.value, pd * (a.derivative + c * b.derivative), b.value, pd * b.derivative};
    }

    // Whole-interval y1 (which = 1) or y2 (which = 2) with derivatives.
    SolutionProfile profile(int which, double beta2) const {
        auto b = eval(pair_, Which::u2, beta2);
        const cplx p0 = pair_.coeffs.p[0];
        if (which == 2) return {b.value, b.derivative, b.tail};
        auto a = eval(pair_, Which::u1, beta2);
        const cplx c = -slope_ * p0;
        return {add(a.value, scale(b.value, c)), add(a.derivative, scale(b.derivative, c)), std::max(a.tail, b.tail)};
    }

    const LayerProfile& profile_data() const { return L_; }
    double k() const { return k_; }
    const SppsSolutionPair& pair() const { return pair_; }

  private:
    static SppsSolutionPair build(const LayerProfile& L, double k, cplx slope, int N, int hom) {
        auto c = layer_coefficients(L, k);
        return build_solution_pair(c, nonvanishing_u0(c, hom, slope), N);
    }
    LayerProfile L_;
    double k_;
    cplx slope_;
    SppsSolutionPair pair_;
};

namespace detail {

// R and T from boundary data with outer fluxes kappa_j = P_j k_j. For p-polarization the
// magnetic amplitudes are converted to tangential electric ones.
inline RTResult assemble_rt(const LayerProfile& L, double k, double theta, const LayerBoundary& b) {
    RTResult r;
    r.theta = theta;
    const double beta = k * L.n1 * std::sin(theta);
    const double k1 = std::sqrt(std::max(0.0, k * k * L.n1 * L.n1 - beta * beta));
    const double k2sq = k * k * L.n2 * L.n2 - beta * beta;
    if (k2sq <= 0) {
        r.evanescent = true;
        throw Error(ErrorCode::evanescent_output, "transmitted wave is evanescent at this angle");
    }
    const double k2 = std::sqrt(k2sq);
    const double P1 = L.pol == Polarization::s ? 1.0 : 1.0 / (L.n1 * L.n1);
    const double P2 = L.pol == Polarization::s ? 1.0 : 1.0 / (L.n2 * L.n2);
    const double K1 = P1 * k1, K2 = P2 * k2;
    const cplx I(0, 1);
    const cplx den = (b.F1 - K1 * K2 * b.y2) + I * (K2 * b.y1 + K1 * b.F2);
    const cplx W = b.y1 * b.F2 - b.F1 * b.y2;
    cplx R = (-b.F1 - I * K2 * b.y1 + I * K1 * b.F2 - K1 * K2 * b.y2) / den;
    cplx T = 2.0 * I * K1 * W * std::exp(I * k2 * L.d()) / den;
    if (L.pol == Polarization::p) {
        R = -R;
        T *= K2 / K1;
    }
    r.R = R;
    r.T = T;
    r.wronskian = std::abs(W);
    r.energy_check = std::norm(R) + L.n2 * std::norm(T) / L.n1;
    r.energy_oblique = std::norm(R) + (L.pol == Polarization::s ? K2 / K1 : K1 / K2) * std::norm(T);
    return r;
}

} // namespace detail

inline RTResult reflectance_transmittance(const LayerSolutions& ls, double theta) {
    const auto& L = ls.profile_data();
    const double beta = ls.k() * L.n1 * std::sin(theta);
    return detail::assemble_rt(L, ls.k(), theta, ls.at(beta * beta));
}

inline RTResult reflectance_transmittance(const LayerProfile& L, const PlaneWaveQuery& q, int N) {
    return reflectance_transmittance(LayerSolutions(L, q.k, N), q.theta);
}

// One build, one series evaluation per angle. Angles past the critical angle come back flagged.
inline std::vector<RTResult> sweep(const LayerProfile& L, double k, const std::vector<double>& thetas, int N) {
    std::vector<RTResult> out(thetas.size());
    if (thetas.empty()) return out;
    LayerSolutions ls(L, k, N);
    parallel_for(static_cast<int>(thetas.size()), [&](int i) {
        try {
            out[i] = reflectance_transmittance(ls, thetas[i]);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::evanescent_output) throw;
            out[i].theta = thetas[i];
            out[i].evanescent = true;
        }
    });
    return out;
}

// p-polarization through U = v/n, which obeys U'' + (k^2 N^2 - beta^2) U = 0 with
// k^2 N^2 = k^2 n^2 + n''/n - 2 (n'/n)^2. Needs a smooth profile; used as a cross-check.
inline RTResult reflectance_transmittance_transformed(const LayerProfile& L, const PlaneWaveQuery& q, int N) {
    if (L.pol != Polarization::p) throw Error(ErrorCode::invalid_argument, "transform applies to p-polarization");
    const Grid& g = L.n.grid;
    auto dn = spline_derivative(L.n, 1);
    auto d2n = spline_derivative(L.n, 2);
    SampledFunction Q(g);
    for (int i = 0; i <= g.m; ++i) {
        const double n = L.n[i].real(), n1 = dn[i].real(), n2 = d2n[i].real();
        Q[i] = q.k * q.k * n * n + n2 / n - 2.0 * (n1 / n) * (n1 / n);
    }
    auto c = make_sl_coefficients(constant(g, 1.0), Q, constant(g, 1.0));
    const cplx slope(0.0, q.k * L.n[0].real());
    auto pr = build_solution_pair(c, nonvanishing_u0(c, 120, slope), N);
    const double beta = q.beta(L.n1);
    const int m = g.m;
    auto a = eval_at(pr, Which::u1, beta * beta, m);
    auto b = eval_at(pr, Which::u2, beta * beta, m);
    // U solutions with U(0)=1, U'(0)=0 (S1) and U(0)=0, U'(0)=1 (S2).
    const cplx S1 = a.value - slope * b.value, S1p = a.derivative - slope * b.derivative;
    const cplx S2 = b.value, S2p = b.derivative;
    // Map to v-solutions with v(0)=1, v'(0)=0 and v(0)=0, v'(0)/n^2=1, where v = n U.
    const double n0 = L.n[0].real(), dn0 = dn[0].real(), nd = L.n[m].real(), dnd = dn[m].real();
    auto vmap = [&](cplx u0v, cplx u0d) {
        // U(0) = u0v, U'(0) = u0d expressed in S1, S2.
        cplx U = u0v * S1 + u0d * S2, Up = u0v * S1p + u0d * S2p;
        cplx v = nd * U, vp = dnd * U + nd * Up;
        return std::pair<cplx, cplx>{v, vp / (nd * nd)};
    };
    auto [y1, F1] = vmap(1.0 / n0, -dn0 / (n0 * n0));
    auto [y2, F2] = vmap(0.0, n0);
    return detail::assemble_rt(L, q.k, q.theta, {y1, F1, y2, F2});
}

} // namespace spps

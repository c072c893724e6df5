#pragma once

#include <cmath>
#include <vector>

#include "spps/grid.hpp"

namespace spps {

// X / Y start from the second weight at odd orders; the tilde kinds start from the first.
enum class FamilyKind { X, Xtilde, Y, Ytilde };

inline bool starts_with_first_weight(FamilyKind k) { return k == FamilyKind::Xtilde || k == FamilyKind::Ytilde; }

// The two alternating integrand weights as seen by the tilde family:
// odd orders integrate against w_odd, even orders against w_even.
struct WeightPair {
    SampledFunction w_odd;
    SampledFunction w_even;
};

struct FormalPowerFamily {
    FamilyKind kind = FamilyKind::X;
    int order = 0;
    std::vector<SampledFunction> members;
    WeightPair weights;

    const Grid& grid() const { return members.front().grid; }
    // Weight multiplying members[n-1] to produce members[n].
    const SampledFunction& weight_for(int n) const {
        bool odd = (n % 2) != 0;
        bool first = starts_with_first_weight(kind);
        return (odd == first) ? weights.w_odd : weights.w_even;
    }
};

inline FormalPowerFamily build_family(FamilyKind kind, const WeightPair& weights, int N,
                                      Quadrature rule = Quadrature::spline) {
    if (N < 1) throw Error(ErrorCode::invalid_argument, "family order must be at least 1");
    if (!(weights.w_odd.grid == weights.w_even.grid))
        throw Error(ErrorCode::grid_mismatch, "weights on different grids");
    FormalPowerFamily fam;
    fam.kind = kind;
    fam.order = N;
    fam.weights = weights;
    fam.members.reserve(N + 1);
    fam.members.emplace_back(weights.w_odd.grid, 1.0);
    for (int n = 1; n <= N; ++n) {
        fam.members.push_back(cumulative_integral(multiply(fam.members.back(), fam.weight_for(n)), rule));
    }
    return fam;
}

enum class Parity { even, odd };

struct SeriesValue {
    cplx value;
    double tail; // magnitude of the last term used
};

// Sum_k z^k members[offset + stride*k](node) with compensated summation in ascending k.
inline SeriesValue evaluate_strided(const FormalPowerFamily& fam, int offset, int stride, cplx z, int node,
                                    int max_index = -1) {
    const int top = max_index < 0 ? fam.order : std::min(max_index, fam.order);
    if (offset < 0 || offset > top) throw Error(ErrorCode::insufficient_order, "requested subsequence is empty");
    detail::CompensatedSum s;
    cplx zk = 1.0;
    double tail = 0;
    for (int n = offset; n <= top; n += stride) {
        cplx term = zk * fam.members[n][node];
        s.add(term);
        tail = std::abs(term);
        zk *= z;
    }
    return {s.value(), tail};
}

inline SeriesValue evaluate_series(const FormalPowerFamily& fam, Parity parity, int offset, cplx z, int node) {
    if ((offset % 2 == 0) != (parity == Parity::even))
        throw Error(ErrorCode::invalid_argument, "offset parity does not match requested parity");
    return evaluate_strided(fam, offset, 2, z, node);
}

// Whole-interval profile of the same sum, plus the largest last-term magnitude over nodes.
inline std::pair<SampledFunction, double> evaluate_profile(const FormalPowerFamily& fam, int offset, int stride,
                                                           cplx z) {
    if (offset < 0 || offset > fam.order) throw Error(ErrorCode::insufficient_order, "requested subsequence is empty");
    const Grid& g = fam.grid();
    std::vector<detail::CompensatedSum> acc(g.m + 1);
    cplx zk = 1.0;
    double tail = 0;
    for (int n = offset; n <= fam.order; n += stride) {
        const auto& mem = fam.members[n];
        for (int i = 0; i <= g.m; ++i) acc[i].add(zk * mem[i]);
        tail = mem.max_abs() * std::abs(zk);
        zk *= z;
    }
    SampledFunction out(g);
    for (int i = 0; i <= g.m; ++i) out[i] = acc[i].value();
    return {out, tail};
}

// Right-hand side of the growth estimate for even members:
// (max|w_odd| max|w_even|)^k (b-a)^{2k} / (2k)!.
inline double even_member_bound(const WeightPair& w, int k) {
    const Grid& g = w.w_odd.grid;
    double c = w.w_odd.max_abs() * w.w_even.max_abs();
    double L = g.b - g.a;
    return std::exp(k * std::log(c * L * L) - std::lgamma(2.0 * k + 1.0));
}

// Same estimate for odd members of the plain family: one extra factor max|w_even| (b-a) / (2k+1).
inline double odd_member_bound(const WeightPair& w, int k) {
    const Grid& g = w.w_odd.grid;
    double c = w.w_odd.max_abs() * w.w_even.max_abs();
    double L = g.b - g.a;
    return std::exp(k * std::log(c * L * L) + std::log(w.w_even.max_abs() * L) - std::lgamma(2.0 * k + 2.0));
}

// Smallest truncation k such that max|members[offset+2k]| * radius^k falls below
// 1e-16 times the largest term seen; returns -1 when the family is too short.
inline int suggest_order(const FormalPowerFamily& fam, int offset, double radius) {
    double scale = 0;
    double rk = 1;
    for (int n = offset, k = 0; n <= fam.order; n += 2, ++k) {
        double term = fam.members[n].max_abs() * rk;
        scale = std::max(scale, term);
        if (k > 0 && term < 1e-16 * scale) return k;
        rk *= radius;
    }
    return -1;
}

} // namespace spps

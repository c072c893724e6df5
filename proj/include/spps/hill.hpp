#pragma once

#include <memory>
#include <ostream>

#include "spps/sl_spectral.hpp"

namespace spps {

// -(p f')' + q f = lambda f on one period [a, a+T], p > 0, q real.
struct PeriodicProblem {
    SampledFunction p, q;
    double T = 0;

    const Grid& grid() const { return p.grid; }
    // The same equation in the form (P f')' + Q f = lambda R f.
    SLCoefficients sl() const { return {scale(p, -1.0), q, constant(p.grid, 1.0)}; }
};

inline PeriodicProblem make_periodic_problem(SampledFunction p, SampledFunction q) {
    if (!(p.grid == q.grid)) throw Error(ErrorCode::grid_mismatch, "p and q on different grids");
    detail::require_real(p, "p");
    detail::require_real(q, "q");
    for (int i = 0; i < p.size(); ++i)
        if (!(p[i].real() > 0)) throw Error(ErrorCode::invalid_argument, "p must be positive", i);
    PeriodicProblem pb;
    pb.T = p.grid.b - p.grid.a;
    pb.p = detail::reanchored(p, 0);
    pb.q = detail::reanchored(q, 0);
    return pb;
}

// f1(0)=1, f1'(0)=0, f2(0)=0, f2'(0)=1 at a fixed lambda.
struct Fundamental {
    SampledFunction f1, f1p, f2, f2p;
    cplx lambda = 0.0;

    cplx discriminant() const { return f1.back() + f2p.back(); }
};

inline Fundamental fundamental_at_lambda0(const PeriodicProblem& pb, cplx lambda0, int N = 120) {
    auto c = pb.sl();
    c.q = add(c.q, constant(pb.grid(), -lambda0));
    auto hp = homogeneous_pair(c, N);
    const cplx p0 = c.p[0];
    return {hp.v1, hp.v1_prime, scale(hp.v2, p0), scale(hp.v2_prime, p0), lambda0};
}

// Normalized fundamental system at lambda from an SPPS pair of the problem.
inline Fundamental fundamental_from_pair(const SppsSolutionPair& pr, cplx lambda) {
    const auto& u0 = pr.particular.u0;
    const cplx u00 = u0[0], u0p0 = pr.particular.u0_prime[0], P0 = pr.coeffs.p[0];
    auto a = eval(pr, Which::u1, lambda);
    auto b = eval(pr, Which::u2, lambda);
    const cplx c1 = -P0 * u0p0, c2 = P0 * u00;
    Fundamental f;
    f.f1 = add(scale(a.value, 1.0 / u00), scale(b.value, c1));
    f.f1p = add(scale(a.derivative, 1.0 / u00), scale(b.derivative, c1));
    f.f2 = scale(b.value, c2);
    f.f2p = scale(b.derivative, c2);
    f.lambda = lambda;
    return f;
}

struct DiscriminantSeries {
    enum class Source { periodic_f0, general_fstar };
    Source source = Source::general_fstar;
    CharacteristicSeries series;
    std::shared_ptr<const ParticularSolution> particular;
    double a0_deviation = 0; // |a0 - 2| for the periodic source

    cplx center() const { return series.center; }
    cplx operator()(cplx lambda) const { return series(lambda); }
};

// D(lambda) = f1(T) + f2'(T) in powers of (lambda - center) for an arbitrary nodeless u0. For a
// periodic u0 the coefficients collapse to Xtilde^(2n)(T) + X^(2n)(T).
inline DiscriminantSeries discriminant_series(const SppsSolutionPair& pr,
                                              DiscriminantSeries::Source source = DiscriminantSeries::Source::general_fstar) {
    const int m = pr.grid().m;
    const auto& ps = pr.particular;
    const cplx u00 = ps.u0[0], u0T = ps.u0[m], u0p0 = ps.u0_prime[0], u0pT = ps.u0_prime[m];
    const cplx P0 = pr.coeffs.p[0], PT = pr.coeffs.p[m];
    const cplx c_even = u0T / u00, c_odd = P0 * (u00 * u0pT - u0p0 * u0T), c_flux = P0 * u00 / (u0T * PT);
    std::vector<cplx> a(pr.N + 1);
    for (int n = 0; n <= pr.N; ++n)
        a[n] = c_even * pr.xtilde.members[2 * n][m] + c_odd * pr.x.members[2 * n + 1][m] + c_flux * pr.x.members[2 * n][m];
    DiscriminantSeries d;
    d.source = source;
    d.series = make_series(pr.center, std::move(a));
    d.particular = std::make_shared<ParticularSolution>(ps);
    if (source == DiscriminantSeries::Source::periodic_f0) d.a0_deviation = std::abs(d.series.coeffs[0] - 2.0);
    return d;
}

inline DiscriminantSeries discriminant_series(const PeriodicProblem& pb, const ParticularSolution& f0, int N,
                                              DiscriminantSeries::Source source = DiscriminantSeries::Source::periodic_f0) {
    return discriminant_series(build_solution_pair(pb.sl(), f0, N), source);
}

struct LowestEigenvalue {
    double lambda0 = 0;
    double lower = 0, upper = 0; // min q and the mean of q (Rayleigh quotient of u = 1)
    double center = 0;           // expansion point lambda* = min q - 1
};

// First root of D - 2 above lambda* from the general-center series.
inline LowestEigenvalue lowest_eigenvalue(const PeriodicProblem& pb, int N = 100) {
    double qmin = INFINITY;
    for (auto v : pb.q.values) qmin = std::min(qmin, v.real());
    const double qmean = definite_integral(pb.q).real() / pb.T;
    const double star = qmin - 1.0;
    auto fs = fundamental_at_lambda0(pb, star, std::max(N, 60));
    ParticularSolution ps{add(fs.f1, scale(fs.f2, cplx(0, 1))), add(fs.f1p, scale(fs.f2p, cplx(0, 1))), star};
    auto d = discriminant_series(build_solution_pair(pb.sl(), ps, N));
    CharacteristicSeries shifted = d.series;
    shifted.coeffs[0] -= 2.0;
    auto f = [&](double x) { return shifted(cplx(x, 0.0)).real(); };
    auto roots = sign_scan_roots(f, star, qmean + 1.0, 512);
    if (roots.empty()) throw Error(ErrorCode::no_root_in_bracket, "D - 2 has no root between min q - 1 and mean q + 1");
    double lam = roots.front();
    try {
        lam = refine_newton(shifted, cplx(lam, 0.0)).real();
    } catch (const Error&) {
    }
    return {lam, qmin, qmean, star};
}

struct PeriodicF0 {
    ParticularSolution f0;
    double alpha_p = 0;
    double periodicity_residual = 0;
};

// f0 = f01 + alpha_p f02, the periodic nodeless solution at the lowest eigenvalue.
inline PeriodicF0 nodeless_periodic_f0(const PeriodicProblem& pb, double lambda0, int N = 120) {
    auto f = fundamental_at_lambda0(pb, lambda0, N);
    const int m = pb.grid().m;
    const double f2T = f.f2[m].real();
    const double scale_ref = std::max({1.0, f.f1.max_abs(), f.f2.max_abs()});
    if (std::abs(f2T) <= 1e-14 * scale_ref) throw Error(ErrorCode::f02_T_zero, "f02(T) vanishes at lambda0");
    const double alpha = (f.f2p[m].real() - f.f1[m].real()) / (2.0 * f2T);
    PeriodicF0 out;
    out.alpha_p = alpha;
    out.f0.u0 = map(add(f.f1, scale(f.f2, alpha)), [](cplx v) { return cplx(v.real()); });
    out.f0.u0_prime = map(add(f.f1p, scale(f.f2p, alpha)), [](cplx v) { return cplx(v.real()); });
    out.f0.lambda_center = lambda0;
    const auto& u = out.f0.u0;
    const auto& up = out.f0.u0_prime;
    const double sc = std::max(u.max_abs(), up.max_abs());
    out.periodicity_residual = std::max(std::abs(u[m] - u[0]), std::abs(up[m] - up[0])) / sc;
    for (int i = 0; i <= m; ++i)
        if (!(std::abs(u[i]) > 1e-10 * u.max_abs()) || u[i].real() * u[0].real() <= 0)
            throw Error(ErrorCode::not_nodeless, "periodic solution changes sign at node " + std::to_string(i), i);
    return out;
}

struct HillOptions {
    double max_growth = 8.0; // hop length so that series growth stays below exp(max_growth)
    int scan_per_hop = 256;
};

struct DiscriminantExtremum {
    double lambda = 0;
    double value = 0;
};

// D on a real range as a set of local series. The first is centered at lambda0 with the periodic
// f0; further centers are reached by hops so each evaluation stays close to some center.
// Pieces are immutable once built; concurrent evaluation is safe.
class HillDiscriminant {
  public:
    HillDiscriminant(const PeriodicProblem& pb, int N, HillOptions opt = {}) : pb_(pb), N_(N), opt_(opt) {
        low_ = lowest_eigenvalue(pb, N);
        f0_ = nodeless_periodic_f0(pb, low_.lambda0, std::max(N, 120));
        auto pr = std::make_shared<SppsSolutionPair>(build_solution_pair(pb.sl(), f0_.f0, N));
        pieces_.push_back(discriminant_series(*pr, DiscriminantSeries::Source::periodic_f0));
        const double L = std::abs(definite_integral(map(pb.p, [](cplx x) { return cplx(1.0 / std::sqrt(x.real())); })));
        hop_ = (opt.max_growth / L) * (opt.max_growth / L);
        up_ = pr;
        down_ = pr;
        hi_ = low_.lambda0 + hop_ / 2;
        lo_ = low_.lambda0 - hop_ / 2;
    }

    double lambda0() const { return low_.lambda0; }
    const LowestEigenvalue& lowest() const { return low_; }
    const PeriodicF0& periodic_f0() const { return f0_; }
    const PeriodicProblem& problem() const { return pb_; }
    int order() const { return N_; }
    double hop() const { return hop_; }
    const std::vector<DiscriminantSeries>& pieces() const { return pieces_; }
    const DiscriminantSeries& periodic_piece() const { return pieces_.front(); }
    double covered_lo() const { return lo_; }
    double covered_hi() const { return hi_; }

    // Extends the centers so that [lo, hi] lies within half a hop of one.
    void cover(double lo, double hi) {
        while (hi_ < hi) {
            double c = up_->center.real() + hop_;
            up_ = std::make_shared<SppsSolutionPair>(build_solution_pair(pb_.sl(), transported_particular(*up_, c, true), N_));
            pieces_.push_back(discriminant_series(*up_));
            hi_ = c + hop_ / 2;
        }
        while (lo_ > lo) {
            double c = down_->center.real() - hop_;
            down_ = std::make_shared<SppsSolutionPair>(build_solution_pair(pb_.sl(), transported_particular(*down_, c, true), N_));
            pieces_.push_back(discriminant_series(*down_));
            lo_ = c - hop_ / 2;
        }
    }

    // Adds a piece centered exactly at lambda, reached from the nearest hop center.
    const DiscriminantSeries& recentre(double lambda) {
        cover(lambda, lambda);
        const auto& near = nearest(lambda);
        SppsSolutionPair base = build_solution_pair(pb_.sl(), *near.particular, N_);
        auto ps = transported_particular(base, lambda, true, opt_.max_growth);
        pieces_.push_back(discriminant_series(build_solution_pair(pb_.sl(), ps, N_)));
        return pieces_.back();
    }

    const DiscriminantSeries& nearest(cplx lambda) const {
        size_t best = 0;
        for (size_t i = 1; i < pieces_.size(); ++i)
            if (std::abs(pieces_[i].center() - lambda) < std::abs(pieces_[best].center() - lambda)) best = i;
        return pieces_[best];
    }

    cplx operator()(cplx lambda) const { return nearest(lambda)(lambda); }
    double value(double lambda) const { return (*this)(cplx(lambda, 0.0)).real(); }
    double slope(double lambda) const { return nearest(lambda).series.derivative(cplx(lambda, 0.0)).real(); }

    // Local extrema of D on [lo, hi] located by sign changes of D'.
    std::vector<DiscriminantExtremum> extrema(double lo, double hi) {
        cover(lo, hi);
        const int n = std::max(16, static_cast<int>(std::ceil((hi - lo) / hop_ * opt_.scan_per_hop)));
        std::vector<DiscriminantExtremum> out;
        auto d = [&](double x) { return slope(x); };
        for (double x : sign_scan_roots(d, lo, hi, n, 1e-15)) out.push_back({x, value(x)});
        return out;
    }

  private:
    PeriodicProblem pb_;
    int N_;
    HillOptions opt_;
    LowestEigenvalue low_;
    PeriodicF0 f0_;
    std::vector<DiscriminantSeries> pieces_;
    std::shared_ptr<SppsSolutionPair> up_, down_;
    double hop_ = 1, lo_ = 0, hi_ = 0;
};

struct BandEdges {
    std::vector<double> all;          // lambda_0, lambda_1, ... in increasing order
    std::vector<double> periodic;     // roots of D - 2
    std::vector<double> antiperiodic; // roots of D + 2
    std::vector<DiscriminantExtremum> extrema;
    bool interlaced = true;
    std::vector<std::string> warnings;
};

namespace detail {

inline double bisect_real(const std::function<double(double)>& f, double a, double b) {
    double fa = f(a);
    for (int it = 0; it < 200 && b - a > 1e-15 * (1 + std::abs(a)); ++it) {
        double mid = 0.5 * (a + b), fm = f(mid);
        if ((fm < 0) == (fa < 0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

inline bool check_interlacing(const std::vector<double>& e) {
    for (size_t i = 1; i < e.size(); ++i) {
        bool pair_inner = (i % 2 == 0); // lambda_{2k-1} <= lambda_{2k}
        if (pair_inner ? e[i] < e[i - 1] : e[i] <= e[i - 1]) return false;
    }
    return true;
}

} // namespace detail

// The first `count` band edges. Every extremum of D with |D| >= 2 carries a pair of edges; D is
// recentred there, so nearly closed gaps keep full accuracy. A gap below the noise level of D is
// reported as closed (both edges at the extremum).
inline BandEdges band_edges(HillDiscriminant& disc, int count) {
    BandEdges out;
    if (count <= 0) return out;
    out.all.push_back(disc.lambda0());
    out.periodic.push_back(disc.lambda0());
    const int pairs = count / 2;
    double lo = disc.lambda0();
    double window = std::max(disc.hop(), 1.0);
    std::vector<DiscriminantExtremum> ext;
    // Collect one extremum beyond the last pair so its right edge is bracketed.
    for (int guard = 0; static_cast<int>(ext.size()) < pairs + 1 && guard < 1000; ++guard) {
        double hi = lo + window;
        for (auto& e : disc.extrema(lo, hi))
            if (e.lambda > disc.lambda0() + 1e-12 * (1 + std::abs(disc.lambda0()))) ext.push_back(e);
        lo = hi;
    }
    for (int k = 0; k < pairs && k < static_cast<int>(ext.size()); ++k) {
        double le = ext[k].lambda;
        const auto& piece = disc.recentre(le);
        // Refine the extremum on the local series.
        CharacteristicSeries dser = piece.series;
        try {
            std::vector<cplx> dc(dser.coeffs.size() - 1);
            for (size_t j = 1; j < dser.coeffs.size(); ++j) dc[j - 1] = double(j) * dser.coeffs[j];
            le = refine_newton(make_polynomial(dser.center, dc), cplx(le, 0.0)).real();
        } catch (const Error&) {
        }
        const double De = piece(cplx(le, 0.0)).real();
        out.extrema.push_back({le, De});
        const double target = De > 0 ? 2.0 : -2.0;
        const double excess = std::abs(De) - 2.0;
        const double noise = 1e3 * 2.2e-16 * piece.series.magnitude(cplx(le, 0.0));
        double left, right;
        if (excess <= noise) {
            if (excess < -1e-6) out.warnings.push_back("extremum near " + std::to_string(le) + " has |D| < 2");
            left = right = le;
        } else {
            auto g = [&](double x) { return disc.value(x) - target; };
            double a = k == 0 ? disc.lambda0() : ext[k - 1].lambda;
            double b = ext[k + 1 < static_cast<int>(ext.size()) ? k + 1 : k].lambda;
            if (b <= le) b = le + disc.hop();
            left = detail::bisect_real(g, a, le);
            right = detail::bisect_real(g, le, b);
            for (double* r : {&left, &right}) {
                CharacteristicSeries s = disc.nearest(*r).series;
                s.coeffs[0] -= target;
                try {
                    double x = refine_newton(s, cplx(*r, 0.0)).real();
                    if (std::abs(x - *r) < 1e-6 * (1 + std::abs(*r))) *r = x;
                } catch (const Error&) {
                }
            }
        }
        out.all.push_back(left);
        out.all.push_back(right);
        auto& list = target > 0 ? out.periodic : out.antiperiodic;
        list.push_back(left);
        list.push_back(right);
    }
    if (static_cast<int>(out.all.size()) > count) out.all.resize(count);
    out.interlaced = detail::check_interlacing(out.all);
    if (!out.interlaced) out.warnings.push_back("band edges fail the interlacing check");
    return out;
}

inline BandEdges band_edges(const PeriodicProblem& pb, int N, int count, HillOptions opt = {}) {
    HillDiscriminant d(pb, N, opt);
    return band_edges(d, count);
}

struct BlochSolution {
    cplx lambda, D;
    cplx beta_plus, beta_minus;
    cplx alpha_plus, alpha_minus;
    SampledFunction F_plus, F_minus; // one cell
    bool degenerate = false;         // band edge: a single (anti)periodic solution

    // F(x + jT) = beta^j F(x) over n cells.
    std::vector<cplx> extended(bool plus, int n_cells) const {
        const auto& F = plus ? F_plus : F_minus;
        const cplx beta = plus ? beta_plus : beta_minus;
        std::vector<cplx> out;
        cplx bj = 1.0;
        for (int j = 0; j < n_cells; ++j) {
            for (int i = (j == 0 ? 0 : 1); i < F.size(); ++i) out.push_back(bj * F[i]);
            bj *= beta;
        }
        return out;
    }
};

inline BlochSolution bloch_solutions(const Fundamental& f, double degenerate_tol = 1e-10) {
    const int m = f.f1.size() - 1;
    const cplx f1T = f.f1[m], f1pT = f.f1p[m], f2T = f.f2[m], f2pT = f.f2p[m];
    BlochSolution b;
    b.lambda = f.lambda;
    b.D = f1T + f2pT;
    const cplx root = std::sqrt(b.D * b.D - 4.0);
    b.beta_plus = 0.5 * (b.D - root);
    b.beta_minus = 0.5 * (b.D + root);
    const double sc = std::max({1.0, std::abs(f1T), std::abs(f2T), std::abs(f2pT), std::abs(f1pT)});
    if (std::abs(f2T) <= 1e-14 * sc) throw Error(ErrorCode::quadratic_degenerate, "f2(T) vanishes");
    const cplx B = f1T - f2pT;
    const cplx disc = std::sqrt(B * B + 4.0 * f2T * f1pT);
    cplx a1 = (-B + disc) / (2.0 * f2T), a2 = (-B - disc) / (2.0 * f2T);
    // Assign each alpha to the multiplier it reproduces.
    cplx b1 = f1T + a1 * f2T;
    if (std::abs(b1 - b.beta_plus) > std::abs(b1 - b.beta_minus)) std::swap(a1, a2);
    b.alpha_plus = a1;
    b.alpha_minus = a2;
    b.degenerate = std::abs(b.D * b.D - 4.0) <= degenerate_tol * std::max(1.0, std::abs(b.D * b.D));
    b.F_plus = add(f.f1, scale(f.f2, a1));
    b.F_minus = b.degenerate ? b.F_plus : add(f.f1, scale(f.f2, a2));
    return b;
}

// Bloch solutions at lambda using the discriminant piece nearest to it.
inline BlochSolution bloch_solutions(const HillDiscriminant& disc, cplx lambda) {
    const auto& piece = disc.nearest(lambda);
    auto pr = build_solution_pair(disc.problem().sl(), *piece.particular, disc.order());
    return bloch_solutions(fundamental_from_pair(pr, lambda));
}

struct SusyPartner {
    PeriodicProblem partner;    // same p, q replaced by q_tilde
    SampledFunction superpotential; // Phi = -sqrt(p) f0'/f0
    SampledFunction log_derivative; // w = f0'/f0
    double lambda0 = 0;
};

// q_tilde = q + 2 sqrt(p) Phi' - sqrt(p) (sqrt(p))''. Phi' uses f0'' from the equation itself;
// derivatives of p and sqrt(p) come from the spline.
inline SusyPartner susy_partner(const PeriodicProblem& pb, const ParticularSolution& f0, double lambda0) {
    const Grid& g = pb.grid();
    auto sp = map(pb.p, [](cplx v) { return cplx(std::sqrt(v.real())); });
    auto dp = spline_derivative(pb.p, 1);
    auto dsp = spline_derivative(sp, 1);
    auto d2sp = spline_derivative(sp, 2);
    SusyPartner s;
    s.lambda0 = lambda0;
    s.log_derivative = SampledFunction(g);
    s.superpotential = SampledFunction(g);
    SampledFunction qt(g);
    for (int i = 0; i <= g.m; ++i) {
        const double p = pb.p[i].real(), q = pb.q[i].real();
        const double f = f0.u0[i].real(), fp = f0.u0_prime[i].real();
        const double w = fp / f;
        const double fpp = ((q - lambda0) * f - dp[i].real() * fp) / p;
        const double wp = fpp / f - w * w;
        const double phi_p = -dsp[i].real() * w - sp[i].real() * wp;
        s.log_derivative[i] = w;
        s.superpotential[i] = -sp[i].real() * w;
        qt[i] = q + 2.0 * sp[i].real() * phi_p - sp[i].real() * d2sp[i].real();
    }
    s.partner = make_periodic_problem(pb.p, qt);
    return s;
}

// Partner fundamental system at lambda built from the original one by the Darboux map
// g = sqrt(p) (f' - w f), then renormalized to the standard initial data.
inline Fundamental partner_fundamental(const PeriodicProblem& pb, const SusyPartner& s, const Fundamental& f) {
    const Grid& g = pb.grid();
    auto sp = map(pb.p, [](cplx v) { return cplx(std::sqrt(v.real())); });
    auto dp = spline_derivative(pb.p, 1);
    auto dsp = spline_derivative(sp, 1);
    auto darboux = [&](const SampledFunction& y, const SampledFunction& yp, SampledFunction& gv, SampledFunction& gp) {
        gv = SampledFunction(g);
        gp = SampledFunction(g);
        for (int i = 0; i <= g.m; ++i) {
            const double p = pb.p[i].real(), q = pb.q[i].real();
            const double w = s.log_derivative[i].real();
            const double wp = ((q - s.lambda0) - dp[i].real() * w) / p - w * w;
            const cplx ypp = ((q - f.lambda) * y[i] - dp[i].real() * yp[i]) / p;
            const cplx core = yp[i] - w * y[i];
            gv[i] = sp[i].real() * core;
            gp[i] = dsp[i].real() * core + sp[i].real() * (ypp - wp * y[i] - w * yp[i]);
        }
    };
    SampledFunction g1, g1p, g2, g2p;
    darboux(f.f1, f.f1p, g1, g1p);
    darboux(f.f2, f.f2p, g2, g2p);
    // Solve [g1 g2; g1' g2'](0) * C = I for the normalized combinations.
    const cplx a = g1[0], b = g2[0], c = g1p[0], d = g2p[0];
    const cplx det = a * d - b * c;
    if (std::abs(det) < 1e-300) throw Error(ErrorCode::quadratic_degenerate, "Darboux images are dependent");
    const cplx c11 = d / det, c21 = -c / det, c12 = -b / det, c22 = a / det;
    Fundamental out;
    out.lambda = f.lambda;
    out.f1 = add(scale(g1, c11), scale(g2, c21));
    out.f1p = add(scale(g1p, c11), scale(g2p, c21));
    out.f2 = add(scale(g1, c12), scale(g2, c22));
    out.f2p = add(scale(g1p, c12), scale(g2p, c22));
    return out;
}

// Rows "lambda,D" over n+1 equally spaced points of [lo, hi].
inline void write_discriminant_csv(std::ostream& os, HillDiscriminant& d, double lo, double hi, int n) {
    d.cover(lo, hi);
    os << "lambda,D\n";
    char buf[96];
    for (int i = 0; i <= n; ++i) {
        double x = lo + (hi - lo) * i / n;
        std::snprintf(buf, sizeof buf, "%.15g,%.15g\n", x, d.value(x));
        os << buf;
    }
}

} // namespace spps

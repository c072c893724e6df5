#pragma once

// One runner per subcommand. Each reads its keys from a Section, writes CSV files into the
// output directory and returns the values an optional `expect` list is checked against.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "config.hpp"
#include "reference_values.hpp"
#include "spps/spps.hpp"

namespace cli {

namespace fs = std::filesystem;

struct Overrides {
    std::optional<int> m, N;
    fs::path out = ".";
};

// Comma-separated, header row, LF endings, 15 significant digits.
class Csv {
  public:
    Csv(const fs::path& path, const std::vector<std::string>& header) : path_(path), os_(path, std::ios::binary) {
        if (!os_) throw ConfigError(path.string() + ": cannot open for writing");
        for (size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
        os_ << '\n';
    }
    void row(const std::vector<double>& v) {
        char buf[40];
        for (size_t i = 0; i < v.size(); ++i) {
            if (std::isnan(v[i]))
                std::snprintf(buf, sizeof buf, "nan");
            else
                std::snprintf(buf, sizeof buf, "%.15g", v[i]);
            os_ << (i ? "," : "") << buf;
        }
        os_ << '\n';
    }
    const fs::path& path() const { return path_; }

  private:
    fs::path path_;
    std::ofstream os_;
};

struct Knobs {
    int m, N;
};

inline Knobs knobs(const Section& sec, const Overrides& o, int m_default, int N_default) {
    Knobs k{sec.get<int>("m", m_default), sec.get<int>("N", N_default)};
    if (o.m && *o.m < 8) throw ConfigError("--m must be at least 8");
    if (o.N && (*o.N < 1 || *o.N > 400)) throw ConfigError("--N must lie in [1, 400]");
    if (o.m) k.m = *o.m;
    if (o.N) k.N = *o.N;
    check_knobs(sec, k.m, k.N);
    return k;
}

inline std::optional<Samples> file_profile(const Section& sec, const std::string& key) {
    if (!sec.has(key) || !sec.raw(key).IsScalar()) return std::nullopt;
    const auto text = sec.raw(key).as<std::string>();
    if (!is_file_spec(text)) return std::nullopt;
    return read_samples(resolve(sec, text.substr(5)));
}

inline std::string profile_name(const Section& sec, const std::string& key, const std::string& fallback,
                                const std::vector<std::string>& allowed) {
    auto name = sec.get<std::string>(key, fallback);
    if (is_file_spec(name)) return "file";
    if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
        std::string list;
        for (auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
        sec.fail(sec.raw(key), "unknown " + key + " '" + name + "' (expected " + list + " or file:PATH)");
    }
    return name;
}

inline std::pair<double, double> pair_of(const Section& sec, const std::string& key, std::pair<double, double> fallback) {
    if (!sec.has(key)) {
        sec.raw(key);
        return fallback;
    }
    auto v = sec.numbers(key);
    if (v.size() != 2 || !(v[1] > v[0])) sec.fail(sec.raw(key), "'" + key + "' must be [lo, hi] with lo < hi");
    return {v[0], v[1]};
}

inline void announce(const Csv& c) { std::cout << "wrote " << c.path().string() << '\n'; }

// ---------------------------------------------------------------------------------------------

inline std::vector<double> run_sl(const Section& sec, const Overrides& o) {
    auto [a, b] = pair_of(sec, "interval", {0.0, M_PI});
    const auto k = knobs(sec, o, 2000, 100);
    const int shifts = sec.get<int>("shifts", 3);
    if (shifts < 0 || shifts > 20) sec.fail(sec.raw("shifts"), "shifts must lie in [0, 20]");
    auto g = spps::make_grid(a, b, k.m, a);
    auto p = coefficient(sec, "p", -1.0), q = coefficient(sec, "q", 0.0), r = coefficient(sec, "r", 1.0);

    spps::SLProblem pb{spps::make_sl_coefficients(spps::sample(g, p), spps::sample(g, q), spps::sample(g, r)),
                       {sec.get<double>("left_alpha", 0.0)},
                       spps::BoundaryConditionUnmixed{0.0},
                       spps::RootConstraint::none()};
    if (sec.has("right_phi")) {
        if (sec.has("right_alpha")) sec.fail(sec.raw("right_phi"), "give either right_alpha or right_phi, not both");
        auto beta = sec.has("right_beta") ? sec.numbers("right_beta") : std::vector<double>{1, 0, 0, 1};
        if (beta.size() != 4) sec.fail(sec.raw("right_beta"), "right_beta must be [beta1, beta2, beta1p, beta2p]");
        spps::BoundaryConditionLambda bc{beta[0], beta[1], beta[2], beta[3], {}};
        for (double c : sec.numbers("right_phi")) bc.phi.push_back(c);
        pb.right = bc;
    } else {
        sec.raw("right_beta");
        pb.right = spps::BoundaryConditionUnmixed{sec.get<double>("right_alpha", 0.0)};
    }
    if (sec.has("search")) {
        auto [lo, hi] = pair_of(sec, "search", {0, 0});
        pb.search = spps::RootConstraint::real_interval(lo, hi);
    } else {
        sec.raw("search");
    }
    sec.finish();

    auto res = spps::solve(pb, k.N, shifts);
    auto ev = res.eigenvalues;
    std::sort(ev.begin(), ev.end(), [](auto& x, auto& y) {
        return x.lambda.real() != y.lambda.real() ? x.lambda.real() < y.lambda.real() : x.lambda.imag() < y.lambda.imag();
    });
    Csv csv(o.out / "eigenvalues.csv", {"n", "re_lambda", "im_lambda", "error_estimate", "multiplicity"});
    std::vector<double> checked;
    for (size_t i = 0; i < ev.size(); ++i) {
        csv.row({double(i), ev[i].lambda.real(), ev[i].lambda.imag(), ev[i].error_estimate, double(ev[i].multiplicity)});
        checked.push_back(ev[i].lambda.real());
    }
    announce(csv);
    for (auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
    return checked;
}

// ---------------------------------------------------------------------------------------------

inline spps::PeriodicProblem mathieu_problem(double r, int m) {
    auto g = spps::make_grid(0, M_PI, m, 0);
    return spps::make_periodic_problem(spps::constant(g, 1.0),
                                       spps::sample(g, [r](double x) { return 2 * r * std::cos(2 * x); }));
}

inline spps::PeriodicProblem razavy_problem(double xi, int m) {
    auto g = spps::make_grid(0, M_PI, m, 0);
    return spps::make_periodic_problem(spps::constant(g, 1.0), spps::sample(g, [xi](double x) {
                                           return xi * xi / 8 * (1 - std::cos(4 * x)) - 3 * xi * std::cos(2 * x);
                                       }));
}

inline std::vector<double> run_hill(const Section& sec, const Overrides& o) {
    const auto kind = profile_name(sec, "potential", "mathieu", {"mathieu", "razavy", "free", "custom"});
    const auto k = knobs(sec, o, 7000, 100);
    const int count = sec.get<int>("count", 11);
    if (count < 1 || count > 200) sec.fail(sec.raw("count"), "count must lie in [1, 200]");
    spps::PeriodicProblem pb;
    if (kind == "mathieu") {
        pb = mathieu_problem(sec.get<double>("r", 1.0), k.m);
    } else if (kind == "razavy") {
        pb = razavy_problem(sec.get<double>("xi", 1.0), k.m);
    } else if (kind == "free") {
        auto g = spps::make_grid(0, sec.get<double>("period", M_PI), k.m, 0);
        pb = spps::make_periodic_problem(spps::constant(g, 1.0), spps::constant(g, 0.0));
    } else if (kind == "file") {
        auto smp = *file_profile(sec, "potential");
        const double x0 = smp.x.front();
        auto g = spps::make_grid(0, smp.x.back() - x0, k.m, 0);
        pb = spps::make_periodic_problem(spps::constant(g, 1.0),
                                         spps::sample(g, [f = interpolant(smp), x0](double x) { return f(x + x0); }));
    } else {
        auto g = spps::make_grid(0, sec.get<double>("period", M_PI), k.m, 0);
        auto p = coefficient(sec, "p", 1.0), q = coefficient(sec, "q", 0.0);
        pb = spps::make_periodic_problem(spps::sample(g, p), spps::sample(g, q));
    }
    std::optional<std::vector<double>> curve;
    if (sec.has("discriminant")) {
        curve = sec.numbers("discriminant");
        if (curve->size() != 3 || !((*curve)[1] > (*curve)[0]) || (*curve)[2] < 1)
            sec.fail(sec.raw("discriminant"), "discriminant must be [lo, hi, intervals]");
    } else {
        sec.raw("discriminant");
    }
    sec.finish();

    spps::HillDiscriminant d(pb, k.N);
    auto e = spps::band_edges(d, count);
    Csv csv(o.out / "band_edges.csv", {"n", "lambda"});
    for (size_t i = 0; i < e.all.size(); ++i) csv.row({double(i), e.all[i]});
    announce(csv);
    if (curve) {
        std::ofstream os(o.out / "discriminant.csv", std::ios::binary);
        spps::write_discriminant_csv(os, d, (*curve)[0], (*curve)[1], int((*curve)[2]));
        std::cout << "wrote " << (o.out / "discriminant.csv").string() << '\n';
    }
    for (auto& w : e.warnings) std::cerr << "warning: " << w << '\n';
    if (!e.interlaced) std::cerr << "warning: band edges do not interlace\n";
    return e.all;
}

// ---------------------------------------------------------------------------------------------

inline spps::WellPotential sech2_well(double v, double a, int m) {
    auto g = spps::make_grid(0, 2 * a, m, 0);
    return spps::make_well(0, 0, spps::sample(g, [v, a](double x) { return -v / std::pow(std::cosh(x - a), 2); }));
}

inline std::vector<double> run_well(const Section& sec, const Overrides& o) {
    const auto kind = profile_name(sec, "potential", "sech2", {"sech2", "square", "gauss"});
    const auto k = knobs(sec, o, 4000, 180);
    const double a1 = sec.get<double>("alpha1", 0.0), a2 = sec.get<double>("alpha2", 0.0);
    std::function<double(double)> q;
    double h = 0;
    if (kind == "sech2") {
        const double v = sec.get<double>("v", 12.0), a = sec.get<double>("a", 5.0);
        h = 2 * a;
        q = [v, a](double x) { return -v / std::pow(std::cosh(x - a), 2); };
    } else if (kind == "square") {
        const double depth = sec.get<double>("depth", 10.0);
        h = sec.get<double>("width", 1.0);
        q = [depth](double) { return -depth; };
    } else if (kind == "gauss") {
        const double v = sec.get<double>("v", 10.0), s = sec.get<double>("sigma", 1.0), a = sec.get<double>("a", 5.0);
        h = 2 * a;
        q = [v, s, a](double x) { return -v * std::exp(-(x - a) * (x - a) / (2 * s * s)); };
    } else {
        auto smp = *file_profile(sec, "potential");
        const double x0 = smp.x.front();
        h = smp.x.back() - x0;
        q = [f = interpolant(smp), x0](double x) { return f(x + x0); };
    }
    if (!(h > 0)) sec.fail(sec.node(), "well width must be positive");
    sec.finish();

    auto w = spps::make_well(a1, a2, spps::sample(spps::make_grid(0, h, k.m, 0), q));
    auto s = spps::solve_well(w, k.N);
    Csv csv(o.out / "eigenvalues.csv", {"n", "lambda", "matching_residual"});
    for (size_t i = 0; i < s.eigenvalues.size(); ++i)
        csv.row({double(i), s.eigenvalues[i], s.eigenfunctions[i].matching_residual});
    announce(csv);
    if (!s.eigenfunctions.empty()) {
        std::vector<std::string> head{"x"};
        for (size_t i = 0; i < s.eigenfunctions.size(); ++i) head.push_back("u" + std::to_string(i));
        Csv ef(o.out / "eigenfunctions.csv", head);
        const int pts = 400;
        for (int j = 0; j <= pts; ++j) {
            const double x = -0.5 * h + 2 * h * j / pts;
            std::vector<double> row{x};
            for (auto& f : s.eigenfunctions) row.push_back(f(x));
            ef.row(row);
        }
        announce(ef);
    }
    return s.eigenvalues;
}

// ---------------------------------------------------------------------------------------------

inline std::vector<double> run_layer(const Section& sec, const Overrides& o) {
    const auto kind = profile_name(sec, "profile", "linear", {"linear", "exponential", "sinusoidal", "constant"});
    const auto kn = knobs(sec, o, 2000, 100);
    const double n1 = sec.get<double>("n1", 1.0), n2 = sec.get<double>("n2", 1.0), k = sec.get<double>("k", 5.0);
    const auto pol_name = sec.get<std::string>("polarization", "s");
    if (pol_name != "s" && pol_name != "p") sec.fail(sec.raw("polarization"), "polarization must be s or p");
    if (!(k > 0)) sec.fail(sec.raw("k"), "k must be positive");
    std::function<double(double)> n;
    double d = 0;
    if (kind == "file") {
        sec.raw("d");
        auto smp = *file_profile(sec, "profile");
        const double x0 = smp.x.front();
        d = smp.x.back() - x0;
        n = [f = interpolant(smp), x0](double x) { return f(x + x0); };
    } else {
        d = sec.get<double>("d", 1.0);
        if (kind == "linear") {
            const double s = sec.get<double>("n_start", 1.2), e = sec.get<double>("n_end", 2.0);
            n = [s, e, d](double x) { return s + (e - s) * x / d; };
        } else if (kind == "exponential") {
            const double n0 = sec.get<double>("n0", 1.5), rate = sec.get<double>("rate", 0.3);
            n = [n0, rate](double x) { return n0 * std::exp(rate * x); };
        } else if (kind == "sinusoidal") {
            const double n0 = sec.get<double>("n0", 1.6), amp = sec.get<double>("amp", 0.2), f = sec.get<double>("freq", 4.0);
            n = [n0, amp, f](double x) { return n0 + amp * std::sin(f * x); };
        } else {
            const double c = sec.get<double>("n", 1.5);
            n = [c](double) { return c; };
        }
    }
    if (!(d > 0)) sec.fail(sec.node(), "layer thickness must be positive");
    auto degrees = angle_list(sec, "thetas");
    for (double t : degrees)
        if (!(t >= 0 && t < 90)) sec.fail(sec.raw("thetas"), "angles must lie in [0, 90) degrees");
    sec.finish();

    auto L = spps::make_layer(n1, n2, spps::sample(spps::make_grid(0, d, kn.m, 0), n),
                              pol_name == "s" ? spps::Polarization::s : spps::Polarization::p);
    std::vector<double> thetas;
    for (double t : degrees) thetas.push_back(t * M_PI / 180);
    auto rs = spps::sweep(L, k, thetas, kn.N);
    Csv csv(o.out / "rt.csv", {"theta_deg", "re_R", "im_R", "abs_R2", "re_T", "im_T", "abs_T2", "energy_check"});
    std::vector<double> checked;
    const double nan = std::nan("");
    for (size_t i = 0; i < rs.size(); ++i) {
        const auto& r = rs[i];
        if (r.evanescent)
            csv.row({degrees[i], r.R.real(), r.R.imag(), std::norm(r.R), nan, nan, nan, nan});
        else
            csv.row({degrees[i], r.R.real(), r.R.imag(), std::norm(r.R), r.T.real(), r.T.imag(), std::norm(r.T), r.energy_check});
        checked.push_back(std::norm(r.R));
    }
    announce(csv);
    return checked;
}

// ---------------------------------------------------------------------------------------------

inline std::vector<double> run_zs(const Section& sec, const Overrides& o) {
    const auto kind = profile_name(sec, "potential", "box", {"box", "gaussian", "sech"});
    const auto k = knobs(sec, o, 4000, 180);
    std::function<double(double)> U;
    double a = 0;
    if (kind == "file") {
        auto smp = *file_profile(sec, "potential");
        a = 0.5 * (smp.x.back() - smp.x.front());
        if (std::abs(smp.x.back() + smp.x.front()) > 1e-12 * (1 + a))
            sec.fail(sec.raw("potential"), "sampled support must be symmetric about x = 0");
        U = interpolant(smp);
    } else {
        const double A = sec.get<double>("A", 1.0);
        a = sec.get<double>("a", kind == "box" ? 1.0 : 6.0);
        if (kind == "box") {
            U = [A](double) { return A; };
        } else if (kind == "gaussian") {
            const double s = sec.get<double>("sigma", 1.0);
            U = [A, s](double x) { return A * std::exp(-x * x / (2 * s * s)); };
        } else {
            U = [A](double x) { return A / std::cosh(x); };
        }
    }
    if (!(a > 0)) sec.fail(sec.node(), "support half-width must be positive");
    sec.finish();

    auto pot = spps::make_zs_potential(spps::sample(spps::make_grid(-a, a, k.m, -a), U));
    auto s = spps::zs_eigenvalues(pot, k.N);
    Csv csv(o.out / "eigenvalues.csv", {"n", "lambda", "error_estimate"});
    std::vector<double> checked;
    for (size_t i = 0; i < s.eigenvalues.size(); ++i) {
        csv.row({double(i), s.eigenvalues[i].lambda.real(), s.eigenvalues[i].error_estimate});
        checked.push_back(s.eigenvalues[i].lambda.real());
    }
    announce(csv);
    for (auto& e : s.nonreal)
        std::cerr << "warning: root off the real axis at " << e.lambda.real() << (e.lambda.imag() < 0 ? "" : "+")
                  << e.lambda.imag() << "i\n";
    return checked;
}

// ---------------------------------------------------------------------------------------------

// Compares computed values with an optional `expect` list; returns the exit status.
inline int check_expectations(const std::vector<double>& computed, const std::vector<double>& expect, double tol) {
    int bad = 0;
    if (computed.size() < expect.size()) {
        std::cerr << "expected " << expect.size() << " values, computed " << computed.size() << '\n';
        return 1;
    }
    for (size_t i = 0; i < expect.size(); ++i) {
        const double err = std::abs(computed[i] - expect[i]);
        if (!(err <= tol)) {
            std::fprintf(stderr, "value %zu: computed %.15g, expected %.15g, error %.3g > %.3g\n", i, computed[i], expect[i],
                         err, tol);
            ++bad;
        }
    }
    return bad ? 1 : 0;
}

inline const std::vector<std::string>& table_ids() {
    static const std::vector<std::string> ids{"4.1", "4.2", "4.3", "4.4", "5.1", "zs-box"};
    return ids;
}

// Recomputes a stored reference table and writes n, computed, reference, abs_error.
inline int reproduce(const std::string& id, const Overrides& o) {
    const auto all = nlohmann::json::parse(spps_reference_values_json);
    if (!all["tables"].contains(id)) throw ConfigError("unknown table '" + id + "'");
    const auto& t = all["tables"][id];
    const auto& kn = t["knobs"];
    const int m = o.m.value_or(kn["m"].get<int>()), N = o.N.value_or(kn["N"].get<int>());
    if (m < 8) throw ConfigError("--m must be at least 8");
    if (N < 1 || N > 400) throw ConfigError("--N must lie in [1, 400]");
    const auto& rows = t["rows"];

    std::vector<double> computed;
    if (id == "4.1" || id == "4.2" || id == "4.3" || id == "4.4") {
        auto pb = id == "4.1" || id == "4.2" ? mathieu_problem(kn["r"].get<double>(), m)
                                             : razavy_problem(kn["xi"].get<double>(), m);
        computed = spps::band_edges(pb, N, int(rows.size())).all;
    } else if (id == "5.1") {
        computed = spps::solve_well(sech2_well(kn["v"].get<double>(), kn["a"].get<double>(), m), N).eigenvalues;
    } else {
        for (double A : {1.0, 4.0}) {
            auto s = spps::zs_eigenvalues(spps::box_potential(A, kn["a"].get<double>(), m), N);
            for (auto& e : s.eigenvalues) computed.push_back(e.lambda.real());
        }
    }

    Csv csv(o.out / ("table_" + id + ".csv"), {"n", "computed", "reference", "abs_error"});
    int failed = 0;
    std::printf("%s\n", t["title"].get<std::string>().c_str());
    for (size_t i = 0; i < rows.size(); ++i) {
        const double ref = rows[i]["value"].get<double>(), tol = rows[i]["tol"].get<double>();
        const double val = i < computed.size() ? computed[i] : std::nan("");
        const double err = std::abs(val - ref);
        const bool ok = err <= tol;
        failed += !ok;
        csv.row({rows[i]["n"].get<double>(), val, ref, err});
        std::printf("  %2zu  %22.15g  %22.15g  %9.2e  %s\n", i, val, ref, err, ok ? "ok" : "FAIL");
    }
    if (computed.size() != rows.size())
        std::printf("  computed %zu values for %zu reference rows\n", computed.size(), rows.size());
    announce(csv);
    std::printf("%s: %d of %zu rows outside tolerance\n", id.c_str(), failed, rows.size());
    return failed == 0 && computed.size() == rows.size() ? 0 : 1;
}

} // namespace cli

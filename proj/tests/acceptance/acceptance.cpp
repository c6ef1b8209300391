// Acceptance runner: one PASS/FAIL line per criterion.
// Usage: acceptance [k]   (k in 1..10; all when omitted)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "dense_oracle.hpp"
#include "homog/dirichlet.hpp"
#include "homog/error.hpp"
#include "homog/gallery.hpp"
#include "homog/homogenize.hpp"
#include "homog/rate_lab.hpp"

using namespace homog;

namespace {

constexpr double tau = 2 * std::numbers::pi;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

ScalarField normalized(const ScalarField& f) { return f * (1.0 / integrate(f)); }

ScalarField one_over(const ScalarField& f) {
    return f.map([](double x) { return 1.0 / x; });
}

// 1. closed-form invariant measures
Outcome closed_forms() {
    const PeriodicGrid g(2, 64);
    std::string d;
    bool ok = true;
    auto check = [&](const char* name, const std::function<ScalarField(const SymMatrixField&)>& closed) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto a = realize(default_spec(name, 2), g);
        const auto r = invariant_measure(a).r;
        const double err = (r - normalized(closed(a))).max_abs();
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        ok = ok && err <= 1e-6 && secs <= 5.0;
        d += std::string(name) + fmt(" err=%.2e", err) + fmt(" t=%.2fs; ", secs);
    };
    check("scalar_times_identity", [](const SymMatrixField& a) { return one_over(a.entry(0, 0)); });
    check("diagonal_separable", [](const SymMatrixField& a) { return one_over(a.entry(0, 0) * a.entry(1, 1)); });
    check("diagonal_missing_own_variable", [&](const SymMatrixField&) { return ScalarField::constant(g, 1.0); });
    check("layered", [](const SymMatrixField& a) { return one_over(a.entry(0, 0)); });
    return {ok, d};
}

// 2. 1D harmonic means; reference values from mpmath quadrature (tests/oracles)
Outcome harmonic_means() {
    const PeriodicGrid g(1, 256);
    struct Case {
        const char* a;
        double hm;
    };
    const Case cases[] = {{"1+0.5*sin(2*pi*y1)", 0.86602540378443865},
                          {"2+cos(2*pi*y1)", 1.7320508075688773},
                          {"exp(0.5*sin(2*pi*y1))", 0.94030619331915731}};
    bool ok = true;
    std::string d;
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& c : cases) {
        CoefficientSpec s;
        s.dim = 1;
        s.params = spec::ScalarTimesIdentity{c.a};
        const auto res = homogenize(realize(s, g));
        const double err = std::abs(res.cells.abar(0, 0) - c.hm);
        ok = ok && err <= 1e-8;
        d += std::string(c.a) + fmt(" err=%.2e; ", err);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ok = ok && secs <= 1.0;
    d += fmt("t=%.2fs", secs);
    return {ok, d};
}

const std::vector<std::string> kGallery{"identity", "scalar_times_identity", "diagonal_separable",
                                        "diagonal_missing_own_variable", "layered", "expression", "shifted_even",
                                        "prop31_bad", "thm16_perturbed", "a_s_family"};

// 3. dual gap
Outcome dual_gap() {
    bool ok = true;
    std::string d;
    for (const auto& v : kGallery) {
        std::vector<double> hs, gaps;
        for (int N : {32, 64, 128}) {
            const auto res = homogenize(realize(default_spec(v, 2), PeriodicGrid(2, N)));
            hs.push_back(1.0 / N);
            gaps.push_back(res.c.dual_gap);
        }
        bool floor = true;
        for (double x : gaps) floor = floor && x <= 1e-12;
        bool order = floor;
        if (!floor && gaps[0] > 0.0 && gaps[1] > 0.0 && gaps[2] > 0.0) order = fit_loglog(hs, gaps).slope >= 2.0;
        ok = ok && gaps.back() <= 1e-6 && order;
        d += v + fmt(" gap128=%.1e", gaps.back()) + (floor ? " (round-off)" : (order ? " (order>=2)" : " (order<2)")) + "; ";
    }
    return {ok, d};
}

// 4. shifted-even symmetry
Outcome shifted_even() {
    const auto res = homogenize(realize(default_spec("shifted_even", 2), PeriodicGrid(2, 64)));
    const double m = res.c.max_abs();
    return {m <= 1e-6, fmt("max|c|=%.2e", m)};
}

// 5. prop31 construction
Outcome prop31() {
    const auto t0 = std::chrono::steady_clock::now();
    const PeriodicGrid g(2, 64);
    bool ok = true;
    std::string d;
    for (double s : {0.02, 0.05}) {
        const auto con = prop31_bad(spec::Prop31{}.alpha, s, g);
        const auto res = homogenize(con.a);
        const double c = res.c(0, 0, 0);
        const double rel = std::abs(c - con.predicted_c111) / std::abs(con.predicted_c111);
        ok = ok && rel <= 0.05 && c < 0.0;
        d += fmt("s=%g ", s) + fmt("c111=%.6e ", c) + fmt("predicted=%.6e ", con.predicted_c111) + fmt("rel=%.1e; ", rel);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ok = ok && secs <= 30.0;
    d += fmt("t=%.2fs", secs);
    return {ok, d};
}

// 6. two-step perturbation of the identity
Outcome thm16() {
    const PeriodicGrid g(2, 64);
    const double delta = 0.1, s = 0.005;
    const auto a0 = SymMatrixField::constant(g, Eigen::Matrix2d::Identity());
    const auto st1 = thm16_step1(a0, delta, spec::Thm16{}.xi);
    const auto st2 = thm16_step2(st1, s);
    const auto res = homogenize(st2.a);
    const int j = st1.j;
    const double c = res.c(j, j, j);
    const double rel = std::abs(c - st2.predicted_c) / std::abs(st2.predicted_c);
    double dist = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int k = i; k < 2; ++k) dist = std::max(dist, (st2.a.entry(i, k) - a0.entry(i, k)).max_abs());
    const bool bad = res.verdict.classification == Classification::c_bad;
    const bool ok = bad && j == 0 && rel <= 0.05 && dist <= delta;
    return {ok, "verdict=" + to_string(res.verdict.classification) + fmt(" c111=%.6e", c) +
                    fmt(" predicted=%.6e", st2.predicted_c) + fmt(" rel=%.1e", rel) + fmt(" |A-I|=%.4f", dist)};
}

// 7. rate dichotomy
Outcome rates() {
    const auto t0 = std::chrono::steady_clock::now();
    RateStudyConfig cfg;  // eps = 1/4..1/32, h = eps/16, cubic (1,1,1)
    const auto good = run_rate_study(default_spec("scalar_times_identity", 2), cfg);
    const double good_slope = good.fit_e0 ? good.fit_e0->slope : 0.0;
    const bool a_ok = good.e0_exact || good_slope >= 1.8;

    const std::string alpha = "exp(3*sin(2*pi*y1)*sin(2*pi*y2))";
    const double s_max = prop31_bad(alpha, 1e-8, PeriodicGrid(2, cfg.cells_per_period)).max_admissible_s;
    CoefficientSpec bad_spec;
    bad_spec.dim = 2;
    bad_spec.params = spec::Prop31{alpha, 0.9 * s_max};
    const auto bad = run_rate_study(bad_spec, cfg);
    const double e0 = bad.fit_e0 ? bad.fit_e0->slope : 0.0;
    const double e1 = bad.fit_e1 ? bad.fit_e1->slope : (bad.e1_exact ? 99.0 : 0.0);
    const bool b_ok = bad.verdict.classification == Classification::c_bad && e0 >= 0.8 && e0 <= 1.2 && e1 >= 1.7;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {a_ok && b_ok && secs <= 900.0,
            fmt("(a) slope e0=%.3f; ", good_slope) + fmt("(b) s=%.3e ", 0.9 * s_max) + fmt("slope e0=%.3f ", e0) +
                fmt("slope e1=%.3f; ", e1) + fmt("t=%.1fs", secs)};
}

// 8. s -> infinity
Outcome asymptotics() {
    const auto st = run_asymptotic_study("1", "1+0.5*sin(2*pi*(y1+y2))", {10, 100, 1000}, 64);
    std::string d;
    for (const auto& p : st.points) d += fmt("s=%g ", p.s) + fmt("dist=%.3e; ", p.distance);
    return {st.strictly_decreasing && st.ratio <= 0.2, d + fmt("ratio=%.3e", st.ratio)};
}

// 9. dense oracles
Outcome dense() {
    const int N = 16;
    const auto a = realize(default_spec("expression", 2), PeriodicGrid(2, N));
    const oracle::Coef2 coef = [&a](int i, int j) {
        const auto p = a.grid().flat_index({i, j, 0});
        return Eigen::Vector3d(a.entry(0, 0)[p], a.entry(0, 1)[p], a.entry(1, 1)[p]);
    };
    const Eigen::MatrixXd L = oracle::torus_operator(coef, N);
    const auto r = invariant_measure(a);
    const double er = (r.r.vector() - oracle::null_vector_adjoint(L)).lpNorm<Eigen::Infinity>();

    auto g = ScalarField::sample(a.grid(), [](std::span<const double> y) {
        return std::cos(tau * y[0]) * std::sin(tau * y[1]) + 0.3 * std::sin(tau * (y[0] - y[1]));
    });
    g = g - ScalarField::constant(a.grid(), integrate(g * r.r));
    const auto v = solve_singular(a, g, r);
    const double ev = (v.vector() - oracle::pseudo_inverse_solve(L, g.vector())).lpNorm<Eigen::Infinity>();

    // 16-cell box (17 nodes per axis): oscillatory and effective solves
    const int K = 16;
    const auto f = [](double x, double y) { return 1.0 + x - y * y; };
    const auto bc = [](double x, double y) { return x * y + std::sin(x); };
    const BoxFunction F = [&](std::span<const double> x) { return f(x[0], x[1]); };
    const BoxFunction G = [&](std::span<const double> x) { return bc(x[0], x[1]); };
    const auto ue = solve_oscillatory(a, 1, N, F, G);
    const Eigen::VectorXd de = oracle::dense_box(coef, f, bc, K);
    const double eb = (Eigen::Map<const Eigen::VectorXd>(ue.values.data(), de.size()) - de).lpNorm<Eigen::Infinity>();

    Eigen::MatrixXd ab(2, 2);
    ab << 1.3, 0.4, 0.4, 0.8;
    const auto uh = solve_effective(ab, BoxGrid(2, K), F, G);
    const Eigen::VectorXd dh = oracle::dense_box([](int, int) { return Eigen::Vector3d(1.3, 0.4, 0.8); }, f, bc, K);
    const double eh = (Eigen::Map<const Eigen::VectorXd>(uh.values.data(), dh.size()) - dh).lpNorm<Eigen::Infinity>();

    const bool ok = er <= 1e-10 && ev <= 1e-10 && eb <= 1e-10 && eh <= 1e-10;
    return {ok, fmt("r=%.1e ", er) + fmt("singular=%.1e ", ev) + fmt("box_osc=%.1e ", eb) + fmt("box_eff=%.1e", eh)};
}

// 10. gauge and scaling
Outcome invariances() {
    const auto a = realize(default_spec("expression", 2), PeriodicGrid(2, 32));
    const auto res = homogenize(a);
    CellSolutionSet shifted = res.cells;
    for (std::size_t k = 0; k < shifted.v.size(); ++k) shifted.v[k] = shifted.v[k] + (0.7 - 1.3 * k);
    const auto cs = obstruction_tensor(a, res.measure, shifted);
    double gauge = 0.0;
    for (std::size_t i = 0; i < cs.c.size(); ++i) gauge = std::max(gauge, std::abs(cs.c[i] - res.c.c[i]));

    const auto res3 = homogenize(a.scaled(3.0));
    double dc = 0.0, dv = 0.0;
    for (std::size_t i = 0; i < res.c.c.size(); ++i) dc = std::max(dc, std::abs(res3.c.c[i] - 3.0 * res.c.c[i]));
    for (std::size_t k = 0; k < res.cells.v.size(); ++k) dv = std::max(dv, (res3.cells.v[k] - res.cells.v[k]).max_abs());
    const double dr = (res3.measure.r - res.measure.r).max_abs();
    const bool same = res3.verdict.classification == res.verdict.classification;
    const bool ok = gauge <= 1e-10 && dc <= 1e-10 && dv <= 1e-10 && dr <= 1e-10 && same;
    return {ok, fmt("gauge=%.1e ", gauge) + fmt("|c(3A)-3c(A)|=%.1e ", dc) + fmt("|v(3A)-v(A)|=%.1e ", dv) +
                    fmt("|r(3A)-r(A)|=%.1e", dr)};
}

const std::vector<std::pair<const char*, Outcome (*)()>> kCriteria{
    {"closed-form invariant measures", closed_forms},
    {"1D harmonic mean", harmonic_means},
    {"dual-formula consistency", dual_gap},
    {"shifted-even symmetry", shifted_even},
    {"prop31 construction", prop31},
    {"two-step perturbation of I", thm16},
    {"rate dichotomy", rates},
    {"s -> infinity asymptotics", asymptotics},
    {"dense oracle equivalence", dense},
    {"gauge and scaling invariance", invariances},
};

}  // namespace

int main(int argc, char** argv) {
    int first = 1, last = static_cast<int>(kCriteria.size());
    if (argc > 1) {
        first = last = std::atoi(argv[1]);
        if (first < 1 || first > static_cast<int>(kCriteria.size())) {
            std::fprintf(stderr, "criterion must be 1..%zu\n", kCriteria.size());
            return 2;
        }
    }
    bool all = true;
    for (int k = first; k <= last; ++k) {
        const auto& [name, fn] = kCriteria[static_cast<std::size_t>(k - 1)];
        Outcome o{false, ""};
        try {
            o = fn();
        } catch (const Error& e) {
            o = {false, "error " + e.kind() + ": " + e.what()};
        }
        std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", k, name, o.detail.c_str());
        std::fflush(stdout);
        all = all && o.pass;
    }
    return all ? 0 : 1;
}

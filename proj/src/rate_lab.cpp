#include "homog/rate_lab.hpp"

#include <cmath>
#include <cstdio>

#include "homog/dirichlet.hpp"
#include "homog/error.hpp"

namespace homog {

CubicData cubic_data(const Eigen::MatrixXd& abar, int j, int k, int l) {
    const int n = static_cast<int>(abar.rows());
    for (int axis : {j, k, l})
        if (axis < 0 || axis >= n) throw ValidationError("axis", "cubic data index out of range");
    auto x = [n](int i) { return Polynomial::coordinate(n, i); };
    const Polynomial u = x(j) * x(k) * x(l);
    const Polynomial f = (x(l) * abar(j, k) + x(j) * abar(k, l) + x(k) * abar(l, j)) * -2.0;
    return {f, u, u};
}

LogLogFit fit_loglog(const std::vector<double>& eps, const std::vector<double>& e) {
    if (eps.size() != e.size()) throw ValidationError("fit", "eps and error lists differ in length");
    if (eps.size() < 2) throw ValidationError("fit", "slope fit needs at least 2 points");
    const auto m = static_cast<Eigen::Index>(eps.size());
    Eigen::MatrixXd x(m, 2);
    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto u = static_cast<std::size_t>(i);
        if (!(eps[u] > 0.0) || !(e[u] > 0.0)) throw ValidationError("fit", "log-log fit needs positive values");
        x(i, 0) = std::log(eps[u]);
        x(i, 1) = 1.0;
        y[i] = std::log(e[u]);
    }
    const Eigen::Vector2d beta = x.colPivHouseholderQr().solve(y);
    const double rms = std::sqrt((x * beta - y).squaredNorm() / static_cast<double>(m));
    return {beta[0], beta[1], rms};
}

void validate_eps_ladder(const std::vector<int>& inv_eps) {
    if (inv_eps.size() < 3) throw ValidationError("eps", "a rate study needs at least 3 eps values");
    for (std::size_t i = 0; i < inv_eps.size(); ++i) {
        if (inv_eps[i] < 1) throw ValidationError("eps", "1/eps values must be positive integers");
        if (i > 0 && inv_eps[i] <= inv_eps[i - 1]) {
            throw ValidationError("eps", "eps must be strictly decreasing (1/eps strictly increasing)");
        }
        if (inv_eps[i] % inv_eps[0] != 0) {
            ValidationError e("divisibility", "1/eps = " + std::to_string(inv_eps[i]) + " is not a multiple of " +
                                                  std::to_string(inv_eps[0]) +
                                                  "; errors are compared on the coarsest grid, so every 1/eps "
                                                  "must be a multiple of the first");
            e.with("inv_eps", inv_eps[i]);
            throw e;
        }
    }
}

RateStudy run_rate_study(const CoefficientSpec& spec, const RateStudyConfig& cfg) {
    validate_eps_ladder(cfg.inv_eps);
    if (cfg.cells_per_period < 4 || cfg.cells_per_period % 2 != 0) {
        throw ValidationError("grid", "cells per period must be even and at least 4");
    }
    const int n = spec.dim;
    for (int a : cfg.jkl)
        if (a < 0 || a >= n) throw ValidationError("axis", "cubic data index out of range");

    // the cell grid matches the box resolution inside one period
    const PeriodicGrid torus(n, cfg.cells_per_period);
    const SymMatrixField a = realize(spec, torus, cfg.tol);
    HomogenizeOptions hopt = cfg.homogenize;
    hopt.tol = cfg.tol;
    const auto hom = homogenize(a, hopt);

    RateStudy out;
    out.spec_variant = spec.variant();
    out.abar = hom.cells.abar;
    out.c = hom.c;
    out.verdict = hom.verdict;

    const auto data = cubic_data(hom.cells.abar, cfg.jkl[0], cfg.jkl[1], cfg.jkl[2]);
    const Polynomial h = z_source(hom.c, data.u);
    out.h_const = h.evaluate(std::array<double, 3>{0.5, 0.5, 0.5});

    const SolverOptions sopt{cfg.tol};
    const int coarse = cfg.inv_eps.front() * cfg.cells_per_period;
    const int finest = cfg.inv_eps.back() * cfg.cells_per_period;
    const DirichletSolution z = solve_z(hom.cells.abar, hom.c, data.u, BoxGrid(n, finest), sopt);
    out.z_max = z.max_abs();

    const BoxGrid common(n, coarse);
    std::vector<double> eps_list, e0_list, e1_list;
    for (int inv : cfg.inv_eps) {
        const DirichletSolution ue =
            solve_oscillatory(a, inv, cfg.cells_per_period, as_function(data.f), as_function(data.g), sopt);
        const int fine_ratio = ue.grid.cells() / coarse;
        const int z_ratio = finest / coarse;
        const double eps = 1.0 / inv;
        RatePoint pt;
        pt.eps = eps;
        pt.inv_eps = inv;
        pt.box_cells = ue.grid.cells();
        pt.residual = ue.residual;
        for (std::size_t p = 0; p < common.size(); ++p) {
            const auto m = common.multi_index(p);
            const auto x = common.coordinate(p);
            std::array<int, 3> mf{}, mz{};
            for (int i = 0; i < 3; ++i) {
                mf[static_cast<std::size_t>(i)] = m[static_cast<std::size_t>(i)] * fine_ratio;
                mz[static_cast<std::size_t>(i)] = m[static_cast<std::size_t>(i)] * z_ratio;
            }
            const double diff = ue.at(mf) - data.u.evaluate(x);
            pt.e0 = std::max(pt.e0, std::abs(diff));
            pt.e1 = std::max(pt.e1, std::abs(diff - 2.0 * eps * z.at(mz)));
        }
        if (!out.points.empty()) {
            const auto& prev = out.points.back();
            const double le = std::log(prev.eps / eps);
            if (prev.e0 > cfg.exact_floor && pt.e0 > cfg.exact_floor) pt.local_slope_e0 = std::log(prev.e0 / pt.e0) / le;
            if (prev.e1 > cfg.exact_floor && pt.e1 > cfg.exact_floor) pt.local_slope_e1 = std::log(prev.e1 / pt.e1) / le;
        }
        eps_list.push_back(eps);
        e0_list.push_back(pt.e0);
        e1_list.push_back(pt.e1);
        out.points.push_back(pt);
    }

    auto fit_or_exact = [&](const std::vector<double>& e, bool& exact) -> std::optional<LogLogFit> {
        exact = true;
        for (double v : e) exact = exact && v <= cfg.exact_floor;
        if (exact) return std::nullopt;
        for (double v : e)
            if (!(v > 0.0)) return std::nullopt;
        return fit_loglog(eps_list, e);
    };
    out.fit_e0 = fit_or_exact(e0_list, out.e0_exact);
    out.fit_e1 = fit_or_exact(e1_list, out.e1_exact);

    const auto& t = cfg.thresholds;
    const bool second = out.verdict.classification == Classification::c_good ||
                        std::abs(out.h_const) <= out.verdict.threshold;
    out.expectation = second ? "second_order" : "first_order";
    if (second) {
        out.pass = out.e0_exact || (out.fit_e0 && out.fit_e0->slope >= t.good_e0_min);
    } else {
        const bool e0_ok = out.fit_e0 && out.fit_e0->slope >= t.bad_e0_min && out.fit_e0->slope <= t.bad_e0_max;
        const bool e1_ok = out.e1_exact || (out.fit_e1 && out.fit_e1->slope >= t.bad_e1_min);
        out.pass = e0_ok && e1_ok;
    }
    return out;
}

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : ""; }

}  // namespace

void write_csv(std::ostream& out, const RateStudy& study) {
    out << "eps,inv_eps,box_cells,e0,e1,local_slope_e0,local_slope_e1\n";
    for (const auto& p : study.points) {
        out << num(p.eps) << ',' << p.inv_eps << ',' << p.box_cells << ',' << num(p.e0) << ',' << num(p.e1) << ','
            << num(p.local_slope_e0) << ',' << num(p.local_slope_e1) << '\n';
    }
}

AsymptoticStudy run_asymptotic_study(const std::string& a1, const std::string& a2, const std::vector<double>& s_list,
                                     int N, double tol) {
    if (s_list.size() < 3) throw ValidationError("s", "an asymptotic study needs at least 3 s values");
    for (std::size_t i = 1; i < s_list.size(); ++i)
        if (!(s_list[i] > s_list[i - 1])) throw ValidationError("s", "s values must be strictly increasing");
    const PeriodicGrid grid(2, N);
    const ScalarField limit = limit_measure(a1, a2, grid);

    AsymptoticStudy out;
    for (double s : s_list) {
        const auto r = invariant_measure(a_s_family(a1, a2, s, grid), tol);
        out.points.push_back({s, l2_norm(r.r - limit), r.residual});
    }
    out.strictly_decreasing = true;
    for (std::size_t i = 1; i < out.points.size(); ++i)
        out.strictly_decreasing = out.strictly_decreasing && out.points[i].distance < out.points[i - 1].distance;
    const double first = out.points.front().distance;
    out.ratio = first > 0.0 ? out.points.back().distance / first : 0.0;
    return out;
}

void write_csv(std::ostream& out, const AsymptoticStudy& study) {
    out << "s,distance,residual\n";
    for (const auto& p : study.points) out << num(p.s) << ',' << num(p.distance) << ',' << num(p.residual) << '\n';
}

}  // namespace homog

#include "homog/homogenize.hpp"

#include <algorithm>
#include <cmath>

#include "homog/error.hpp"

namespace homog {

const ScalarField& CellSolutionSet::corrector(int k, int l) const {
    const int n = grid.dim();
    if (k < 0 || l < 0 || k >= n || l >= n) throw ValidationError("axis", "corrector index out of range");
    return v[SymMatrixField::packed_index(n, k, l)];
}

double ObstructionTensor::max_abs() const noexcept {
    double m = 0.0;
    for (double x : c) m = std::max(m, std::abs(x));
    return m;
}

std::string to_string(Classification c) { return c == Classification::c_good ? "c-good" : "c-bad"; }

CellSolutionSet solve_cell_problems(const SingularSolver& solver, const SymMatrixField& a,
                                    const InvariantMeasure& r) {
    const auto& grid = a.grid();
    const int n = grid.dim();
    CellSolutionSet out{grid, {}, Eigen::MatrixXd::Zero(n, n), 0.0};
    for (int k = 0; k < n; ++k) {
        for (int l = k; l < n; ++l) {
            // abar_kl from the measure makes the right side exactly r-orthogonal
            const double abar = integrate(a.entry(k, l) * r.r);
            out.abar(k, l) = out.abar(l, k) = abar;
            const ScalarField rhs = a.entry(k, l) + (-abar);
            ScalarField v = solver.solve(rhs, r, solver.options().tol, a.entry(k, l).max_abs());
            const double res = (solver.op().apply(v) - rhs).max_abs();
            out.residual = std::max(out.residual, res / std::max(1.0, solver.op().norm_inf() * v.max_abs()));
            out.v.push_back(std::move(v));
        }
    }
    return out;
}

CellSolutionSet solve_cell_problems(const SymMatrixField& a, const InvariantMeasure& r, double tol) {
    return solve_cell_problems(SingularSolver(a, SolverOptions{tol}), a, r);
}

ScalarField divergence_field(const SymMatrixField& a, const ScalarField& r, int j) {
    ScalarField b(a.grid());
    for (int i = 0; i < a.dim(); ++i) b = b + derivative(a.entry(i, j) * r, i);
    return b;
}

ObstructionTensor obstruction_tensor(const SymMatrixField& a, const InvariantMeasure& r,
                                     const CellSolutionSet& cells) {
    const int n = a.dim();
    if (!(cells.grid == a.grid()) || !(r.r.grid() == a.grid())) {
        throw ValidationError("grid", "obstruction tensor inputs come from different grids");
    }
    ObstructionTensor out{n, std::vector<double>(static_cast<std::size_t>(n * n * n), 0.0), 0.0};

    std::vector<ScalarField> flux;  // a_ij r, packed
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) flux.push_back(a.entry(i, j) * r.r);
    auto ar = [&](int i, int j) -> const ScalarField& { return flux[SymMatrixField::packed_index(n, i, j)]; };

    std::vector<ScalarField> b;
    for (int j = 0; j < n; ++j) b.push_back(divergence_field(a, r.r, j));

    for (int k = 0; k < n; ++k) {
        for (int l = k; l < n; ++l) {
            const ScalarField& v = cells.corrector(k, l);
            std::vector<ScalarField> grad;
            for (int i = 0; i < n; ++i) grad.push_back(derivative(v, i));
            for (int j = 0; j < n; ++j) {
                double form1 = 0.0;
                for (int i = 0; i < n; ++i) form1 += integrate(ar(i, j) * grad[i]);
                const double form2 = -integrate(b[j] * v);
                out.c[(k * n + l) * n + j] = form1;
                out.c[(l * n + k) * n + j] = form1;
                out.dual_gap = std::max(out.dual_gap, std::abs(form1 - form2));
            }
        }
    }
    return out;
}

Verdict classify(const ObstructionTensor& c, double threshold) {
    if (!(threshold > 0.0)) throw ValidationError("threshold", "classification threshold must be positive");
    Verdict v;
    v.max_abs_c = c.max_abs();
    v.threshold = threshold;
    v.margin = v.max_abs_c - threshold;
    v.classification = v.max_abs_c > threshold ? Classification::c_bad : Classification::c_good;
    return v;
}

ScalarField solve_p_auxiliary(const SingularSolver& solver, const SymMatrixField& a, const InvariantMeasure& r,
                              const CellSolutionSet& cells, const ObstructionTensor& c, int d, int k, int l,
                              double compat_tol) {
    const int n = a.dim();
    if (d < 0 || d >= n) throw ValidationError("axis", "p auxiliary index d out of range");
    const ScalarField& v = cells.corrector(k, l);
    ScalarField rhs = ScalarField::constant(a.grid(), -c(k, l, d));
    for (int i = 0; i < n; ++i) rhs = rhs + a.entry(i, d) * derivative(v, i);

    const double compat = integrate(rhs * r.r);
    if (std::abs(compat) > compat_tol * std::max(1.0, rhs.max_abs())) {
        NumericalError e("compatibility", "p auxiliary right side is not r-orthogonal; c and v are inconsistent");
        e.with("integral_rhs_r", compat);
        throw e;
    }
    // deflation in solve() removes the round-off compatibility defect
    return solver.solve(rhs, r, compat_tol);
}

ScalarField solve_p_auxiliary(const SymMatrixField& a, const InvariantMeasure& r, const CellSolutionSet& cells,
                              const ObstructionTensor& c, int d, int k, int l, double tol) {
    return solve_p_auxiliary(SingularSolver(a, SolverOptions{tol}), a, r, cells, c, d, k, l);
}

ScalarField corrector_for_matrix(const CellSolutionSet& cells, const Eigen::MatrixXd& m) {
    const int n = cells.grid.dim();
    if (m.rows() != n || m.cols() != n) throw ValidationError("matrix", "corrector matrix has the wrong size");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-14 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
        throw ValidationError("matrix", "corrector matrix must be symmetric");
    }
    ScalarField out(cells.grid);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
            if (m(k, l) != 0.0) out = out + cells.corrector(k, l) * m(k, l);
    return out;
}

double absolute_threshold(const SymMatrixField& a, const CellSolutionSet& cells, double relative) {
    double vmax = 0.0;
    for (const auto& v : cells.v) vmax = std::max(vmax, v.max_abs());
    return relative * std::max(1.0, a.sup_norm() * vmax);
}

HomogenizationResult homogenize(const SymMatrixField& a, const HomogenizeOptions& options) {
    SingularSolver solver(a, SolverOptions{options.tol});
    InvariantMeasure measure = solver.invariant_measure();
    CellSolutionSet cells = solve_cell_problems(solver, a, measure);
    ObstructionTensor c = obstruction_tensor(a, measure, cells);
    Verdict verdict = classify(c, absolute_threshold(a, cells, options.threshold));
    return {std::move(measure), std::move(cells), std::move(c), verdict};
}

}  // namespace homog

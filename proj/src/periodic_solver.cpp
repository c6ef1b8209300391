#include "homog/periodic_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "homog/error.hpp"
#include "refined_lu.hpp"

namespace homog {

namespace {

using detail::inf_norm;
using detail::RefinedLU;

Eigen::SparseMatrix<double> bordered(const Eigen::SparseMatrix<double>& m) {
    const auto n = m.rows();
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(m.nonZeros() + 2 * n);
    for (int k = 0; k < m.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
    for (Eigen::Index i = 0; i < n; ++i) {
        t.emplace_back(i, n, 1.0);
        t.emplace_back(n, i, 1.0);
    }
    Eigen::SparseMatrix<double> b(n + 1, n + 1);
    b.setFromTriplets(t.begin(), t.end());
    b.makeCompressed();
    return b;
}

}  // namespace

DiscreteOperator::DiscreteOperator(const SymMatrixField& a) : grid_(a.grid()) {
    const auto& g = grid_;
    const int n = g.dim();
    const double h2 = g.spacing() * g.spacing();
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(g.size() * (n == 1 ? 3 : n == 2 ? 9 : 19));
    for (std::size_t p = 0; p < g.size(); ++p) {
        const auto row = static_cast<int>(p);
        for (int i = 0; i < n; ++i) {
            const double aii = a.entry(i, i)[p] / h2;
            t.emplace_back(row, row, 2.0 * aii);
            t.emplace_back(row, static_cast<int>(g.neighbor(p, i, 1)), -aii);
            t.emplace_back(row, static_cast<int>(g.neighbor(p, i, -1)), -aii);
            for (int j = i + 1; j < n; ++j) {
                // both (i,j) and (j,i) terms: -2 a_ij d_ij
                const double w = 2.0 * a.entry(i, j)[p] * 0.25 / h2;
                if (w == 0.0) continue;
                for (int si : {1, -1}) {
                    const auto q = g.neighbor(p, i, si);
                    for (int sj : {1, -1}) {
                        t.emplace_back(row, static_cast<int>(g.neighbor(q, j, sj)), -w * si * sj);
                    }
                }
            }
        }
    }
    const auto size = static_cast<Eigen::Index>(g.size());
    matrix_.resize(size, size);
    matrix_.setFromTriplets(t.begin(), t.end());
    matrix_.makeCompressed();
    norm_inf_ = inf_norm(matrix_);
}

ScalarField DiscreteOperator::apply(const ScalarField& v) const {
    Eigen::VectorXd out = matrix_ * v.vector();
    return ScalarField(grid_, std::vector<double>(out.data(), out.data() + out.size()));
}

ScalarField DiscreteOperator::apply_adjoint(const ScalarField& r) const {
    Eigen::VectorXd out = matrix_.transpose() * r.vector();
    return ScalarField(grid_, std::vector<double>(out.data(), out.data() + out.size()));
}

// ---------------------------------------------------------------------------

struct SingularSolver::Factorizations {
    Factorizations(const Eigen::SparseMatrix<double>& l, const SolverOptions& opt)
        : forward(bordered(l), opt), adjoint(bordered(Eigen::SparseMatrix<double>(l.transpose())), opt) {}

    RefinedLU forward;
    RefinedLU adjoint;
};

SingularSolver::SingularSolver(const SymMatrixField& a, SolverOptions options)
    : op_(a), options_(options), lu_(std::make_unique<Factorizations>(op_.matrix(), options)) {}

SingularSolver::~SingularSolver() = default;
SingularSolver::SingularSolver(SingularSolver&&) noexcept = default;
SingularSolver& SingularSolver::operator=(SingularSolver&&) noexcept = default;

InvariantMeasure SingularSolver::invariant_measure() const {
    const auto& g = op_.grid();
    const auto m = static_cast<Eigen::Index>(g.size());
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m + 1);
    b[m] = static_cast<double>(m);  // sum r = m  <=>  integrate(r) = 1
    auto sol = lu_->adjoint.solve(b);

    std::vector<double> r(sol.x.data(), sol.x.data() + m);
    double sum = 0.0;
    for (double v : r) sum += v;
    const double scale = static_cast<double>(m) / sum;
    double rmin = r[0];
    for (double& v : r) {
        v *= scale;
        rmin = std::min(rmin, v);
    }
    if (!(rmin > 0.0)) {
        NumericalError e("nonpositive_measure",
                         "invariant measure has nonpositive entries; the grid is too coarse for this coefficient");
        e.with("min_r", rmin).with("N", g.resolution());
        throw e;
    }
    ScalarField field(g, std::move(r));
    const double res = op_.apply_adjoint(field).max_abs() / (op_.norm_inf() * field.max_abs());
    if (res > options_.tol) {
        NumericalError e("non_convergence", "adjoint residual of the invariant measure exceeds tolerance");
        e.with("residual", res).with("tol", options_.tol);
        throw e;
    }
    return {std::move(field), res, sol.iterations};
}

ScalarField SingularSolver::solve(const ScalarField& g, const InvariantMeasure& r) const {
    return solve(g, r, options_.tol);
}

ScalarField SingularSolver::solve(const ScalarField& g, const InvariantMeasure& r, double tol_compat,
                                  double scale) const {
    const auto& grid = op_.grid();
    if (!(g.grid() == grid) || !(r.r.grid() == grid)) {
        throw ValidationError("grid", "right side, measure and operator must share a grid");
    }
    const double gnorm = g.max_abs();
    if (gnorm == 0.0) return ScalarField(grid);

    const double compat = integrate(g * r.r);
    if (std::abs(compat) > tol_compat * std::max(gnorm, scale)) {
        NumericalError e("compatibility", "right side is not orthogonal to the invariant measure");
        e.with("integral_g_r", compat).with("norm_g", gnorm).with("tol", tol_compat);
        throw e;
    }

    const auto m = static_cast<Eigen::Index>(grid.size());
    const auto rv = r.r.vector();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m + 1);
    b.head(m) = g.vector() - (g.vector().dot(rv) / rv.dot(rv)) * rv;
    auto sol = lu_->forward.solve(b);

    Eigen::VectorXd v = sol.x.head(m);
    v.array() -= v.mean();
    return ScalarField(grid, std::vector<double>(v.data(), v.data() + m));
}

InvariantMeasure invariant_measure(const SymMatrixField& a, double tol) {
    return SingularSolver(a, SolverOptions{tol}).invariant_measure();
}

ScalarField solve_singular(const SymMatrixField& a, const ScalarField& g, const InvariantMeasure& r, double tol) {
    return SingularSolver(a, SolverOptions{tol}).solve(g, r);
}

}  // namespace homog

#pragma once

#include <memory>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "homog/torus_field.hpp"

namespace homog {

inline constexpr double kDefaultTol = 1e-10;

struct SolverOptions {
    /// Normwise relative residual target, ||b - Mx|| / (||M|| ||x|| + ||b||), max norms.
    double tol = kDefaultTol;
    /// Cap on refinement sweeps after the initial direct solve.
    int max_iterations = 10;
};

/// Sparse finite-difference matrix of v -> -a_ij(y) d_ij v on the torus grid.
///
/// Diagonal terms use the 3-point second difference, cross terms the 4-point
/// product of centered differences, so each row couples at most 3^n nodes.
/// The row sums vanish: constants are in the kernel.
class DiscreteOperator {
public:
    using Matrix = Eigen::SparseMatrix<double>;

    explicit DiscreteOperator(const SymMatrixField& a);

    const PeriodicGrid& grid() const noexcept { return grid_; }
    const Matrix& matrix() const noexcept { return matrix_; }
    double norm_inf() const noexcept { return norm_inf_; }

    ScalarField apply(const ScalarField& v) const;
    ScalarField apply_adjoint(const ScalarField& r) const;

private:
    PeriodicGrid grid_;
    Matrix matrix_;
    double norm_inf_ = 0.0;
};

/// Adjoint null vector: r > 0, integrate(r) = 1, L^T r = 0.
struct InvariantMeasure {
    ScalarField r;
    /// ||L^T r||_inf / (||L||_inf ||r||_inf).
    double residual = 0.0;
    int iterations = 0;
};

/// Holds the two bordered factorizations of one coefficient field,
///
///     [ L^T  1 ] [ r ]   [ 0 ]        [ L   1 ] [ v  ]   [ g ]
///     [ 1^T  0 ] [ l ] = [ m ]  and   [ 1^T 0 ] [ mu ] = [ 0 ],
///
/// which are nonsingular because the kernel of L is the constants and its
/// co-kernel is span{r}. Immutable once built; solves are const.
class SingularSolver {
public:
    explicit SingularSolver(const SymMatrixField& a, SolverOptions options = {});
    ~SingularSolver();
    SingularSolver(SingularSolver&&) noexcept;
    SingularSolver& operator=(SingularSolver&&) noexcept;

    const DiscreteOperator& op() const noexcept { return op_; }
    const SolverOptions& options() const noexcept { return options_; }

    InvariantMeasure invariant_measure() const;

    /// Mean-zero v with L v = g. The right side is first checked against the
    /// co-kernel, |integrate(g r)| <= tol_compat * ||g||_inf, then deflated
    /// g <- g - (<g,r>/<r,r>) r before solving.
    ScalarField solve(const ScalarField& g, const InvariantMeasure& r) const;

    /// Like solve() with an explicit compatibility tolerance; the bound is
    /// tol_compat * max(||g||_inf, scale), so a right side that is round-off
    /// of some larger quantity of size `scale` is accepted.
    ScalarField solve(const ScalarField& g, const InvariantMeasure& r, double tol_compat, double scale = 0.0) const;

private:
    struct Factorizations;

    DiscreteOperator op_;
    SolverOptions options_;
    std::unique_ptr<Factorizations> lu_;
};

InvariantMeasure invariant_measure(const SymMatrixField& a, double tol = kDefaultTol);

ScalarField solve_singular(const SymMatrixField& a, const ScalarField& g, const InvariantMeasure& r,
                           double tol = kDefaultTol);

}  // namespace homog

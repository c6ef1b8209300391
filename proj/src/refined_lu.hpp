#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "homog/periodic_solver.hpp"

namespace homog::detail {

struct RefinedSolve {
    Eigen::VectorXd x;
    /// normwise backward error ||b - Mx|| / (||M|| ||x|| + ||b||), max norms
    double residual = 0.0;
    int iterations = 0;
};

/// Sparse LU of a fixed matrix; each solve is refined until the backward
/// error drops below the tolerance, otherwise NumericalError.
class RefinedLU {
public:
    RefinedLU(Eigen::SparseMatrix<double> m, SolverOptions options);

    RefinedSolve solve(const Eigen::VectorXd& b) const;
    const Eigen::SparseMatrix<double>& matrix() const noexcept { return m_; }
    double norm_inf() const noexcept { return norm_; }

private:
    Eigen::SparseMatrix<double> m_;
    SolverOptions options_;
    double norm_ = 0.0;
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
};

double inf_norm(const Eigen::SparseMatrix<double>& m);

}  // namespace homog::detail

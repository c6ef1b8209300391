#include "refined_lu.hpp"

#include <cmath>

#include "homog/error.hpp"

namespace homog::detail {

double inf_norm(const Eigen::SparseMatrix<double>& m) {
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(m.rows());
    for (int k = 0; k < m.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) rows[it.row()] += std::abs(it.value());
    return rows.size() ? rows.maxCoeff() : 0.0;
}

RefinedLU::RefinedLU(Eigen::SparseMatrix<double> m, SolverOptions options)
    : m_(std::move(m)), options_(options), norm_(inf_norm(m_)) {
    m_.makeCompressed();
    lu_.analyzePattern(m_);
    lu_.factorize(m_);
    if (lu_.info() != Eigen::Success) {
        throw NumericalError("factorization", "sparse LU failed: " + lu_.lastErrorMessage());
    }
}

RefinedSolve RefinedLU::solve(const Eigen::VectorXd& b) const {
    Eigen::VectorXd x = lu_.solve(b);
    const double bnorm = b.lpNorm<Eigen::Infinity>();
    auto backward = [&](const Eigen::VectorXd& res) {
        const double denom = norm_ * x.lpNorm<Eigen::Infinity>() + bnorm;
        return denom > 0.0 ? res.lpNorm<Eigen::Infinity>() / denom : 0.0;
    };
    Eigen::VectorXd res = b - m_ * x;
    double err = backward(res);
    int it = 0;
    while (!(err <= options_.tol) && it < options_.max_iterations) {
        x += lu_.solve(res);
        res = b - m_ * x;
        err = backward(res);
        ++it;
    }
    if (!std::isfinite(err) || err > options_.tol) {
        NumericalError e("non_convergence", "linear solve did not reach the residual tolerance");
        e.with("residual", err).with("tol", options_.tol).with("iterations", it);
        throw e;
    }
    return {std::move(x), err, it};
}

}  // namespace homog::detail

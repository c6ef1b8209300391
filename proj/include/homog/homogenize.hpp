#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "homog/periodic_solver.hpp"
#include "homog/torus_field.hpp"

namespace homog {

/// Correctors v^{kl} (mean-zero gauge) and the effective matrix.
struct CellSolutionSet {
    PeriodicGrid grid;
    /// Packed upper-triangular storage, v^{kl} = v^{lk}.
    std::vector<ScalarField> v;
    Eigen::MatrixXd abar;
    /// Largest max-norm residual of -a_ij v_ij - a_kl + abar_kl over all (k,l).
    double residual = 0.0;

    const ScalarField& corrector(int k, int l) const;
};

/// c^{kl}_j = integral of a_ij (d_i v^{kl}) r, stored densely as c[(k*n + l)*n + j].
struct ObstructionTensor {
    int dim = 0;
    std::vector<double> c;
    /// max |form1 - form2| where form2 = -integral (a_ij r)_{y_i} v^{kl}.
    double dual_gap = 0.0;

    double operator()(int k, int l, int j) const { return c[(k * dim + l) * dim + j]; }
    double max_abs() const noexcept;
};

enum class Classification { c_good, c_bad };

std::string to_string(Classification c);

struct Verdict {
    Classification classification = Classification::c_good;
    double max_abs_c = 0.0;
    double threshold = 0.0;
    /// max_abs_c - threshold; positive means c-bad.
    double margin = 0.0;
};

CellSolutionSet solve_cell_problems(const SingularSolver& solver, const SymMatrixField& a,
                                    const InvariantMeasure& r);
CellSolutionSet solve_cell_problems(const SymMatrixField& a, const InvariantMeasure& r, double tol = kDefaultTol);

ObstructionTensor obstruction_tensor(const SymMatrixField& a, const InvariantMeasure& r,
                                     const CellSolutionSet& cells);

Verdict classify(const ObstructionTensor& c, double threshold);

/// Mean-zero p^{dkl} solving -a_ij p_ij = a_id d_i v^{kl} - c^{kl}_d.
///
/// The constant enters with a minus sign: that is the value that makes the
/// right side orthogonal to r (c is defined as its r-average). The
/// compatibility integral is checked against `compat_tol` before solving.
ScalarField solve_p_auxiliary(const SingularSolver& solver, const SymMatrixField& a, const InvariantMeasure& r,
                              const CellSolutionSet& cells, const ObstructionTensor& c, int d, int k, int l,
                              double compat_tol = 1e-8);
ScalarField solve_p_auxiliary(const SymMatrixField& a, const InvariantMeasure& r, const CellSolutionSet& cells,
                              const ObstructionTensor& c, int d, int k, int l, double tol = kDefaultTol);

/// v(y, M) = M_kl v^{kl}(y) for symmetric M.
ScalarField corrector_for_matrix(const CellSolutionSet& cells, const Eigen::MatrixXd& m);

/// b_j = (a_ij r)_{y_i}; vanishes identically for the families of the
/// divergence-free condition.
ScalarField divergence_field(const SymMatrixField& a, const ScalarField& r, int j);

struct HomogenizeOptions {
    double tol = kDefaultTol;
    /// Relative classification threshold; the absolute threshold is
    /// threshold * max(1, ||A||_C0 * max_kl ||v^{kl}||_inf).
    double threshold = 1e-6;
};

struct HomogenizationResult {
    InvariantMeasure measure;
    CellSolutionSet cells;
    ObstructionTensor c;
    Verdict verdict;
};

HomogenizationResult homogenize(const SymMatrixField& a, const HomogenizeOptions& options = {});

double absolute_threshold(const SymMatrixField& a, const CellSolutionSet& cells, double relative);

}  // namespace homog

#pragma once

#include <array>
#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "homog/homogenize.hpp"
#include "homog/periodic_solver.hpp"
#include "homog/polynomial.hpp"
#include "homog/torus_field.hpp"

namespace homog {

/// Uniform node grid on the closed unit box [0,1]^n with `cells` intervals
/// (cells + 1 nodes) per axis. Row-major, last axis fastest.
class BoxGrid {
public:
    BoxGrid(int dim, int cells);

    int dim() const noexcept { return dim_; }
    int cells() const noexcept { return cells_; }
    int nodes_per_axis() const noexcept { return cells_ + 1; }
    double spacing() const noexcept { return 1.0 / cells_; }
    std::size_t size() const noexcept { return size_; }

    std::array<int, 3> multi_index(std::size_t flat) const noexcept;
    std::size_t flat_index(std::array<int, 3> multi) const noexcept;
    std::array<double, 3> coordinate(std::size_t flat) const noexcept;
    bool on_boundary(std::size_t flat) const noexcept;

    bool operator==(const BoxGrid&) const = default;

private:
    int dim_;
    int cells_;
    std::size_t size_;
    std::array<std::size_t, 3> stride_{};
};

using BoxFunction = std::function<double(std::span<const double>)>;

BoxFunction as_function(const Polynomial& p);

struct DirichletSolution {
    BoxGrid grid;
    std::vector<double> values;
    /// Backward error of the interior linear solve.
    double residual = 0.0;

    double at(std::array<int, 3> multi) const { return values[grid.flat_index(multi)]; }
    double max_abs() const noexcept;
};

/// u_eps for -a_ij(x/eps) d_ij u = f, u = g on the boundary, eps = 1/inv_eps.
///
/// The box has inv_eps * cells_per_period cells per axis, so each period
/// holds cells_per_period cells; the torus resolution of `a` must be a
/// multiple of cells_per_period so that coefficient samples land on torus nodes.
DirichletSolution solve_oscillatory(const SymMatrixField& a, int inv_eps, int cells_per_period, const BoxFunction& f,
                                    const BoxFunction& g, SolverOptions options = {});

/// -abar_ij d_ij u = f with Dirichlet data g. Exact on cubic polynomials.
DirichletSolution solve_effective(const Eigen::MatrixXd& abar, const BoxGrid& grid, const BoxFunction& f,
                                  const BoxFunction& g, SolverOptions options = {});

/// The source h(x) = c^{kl}_j u_{x_j x_k x_l}(x) (summed over all j, k, l).
Polynomial z_source(const ObstructionTensor& c, const Polynomial& u);

/// z with -abar_ij z_ij = h, z = 0 on the boundary.
///
/// The source enters with a plus sign: this is the choice for which
/// u_eps - u - 2 eps z = O(eps^2) under the p-problem normalization of
/// solve_p_auxiliary.
DirichletSolution solve_z(const Eigen::MatrixXd& abar, const ObstructionTensor& c, const Polynomial& u,
                          const BoxGrid& grid, SolverOptions options = {});

/// Grid-function variant: third derivatives of u by centered differences,
/// evaluated at the nearest node at least two cells from the boundary.
DirichletSolution solve_z(const Eigen::MatrixXd& abar, const ObstructionTensor& c, const DirichletSolution& u,
                          SolverOptions options = {});

/// Header "x1,..,xn,value" then one row per node.
void write_csv(std::ostream& out, const DirichletSolution& s);

}  // namespace homog

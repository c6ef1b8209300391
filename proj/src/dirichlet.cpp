#include "homog/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "homog/error.hpp"
#include "refined_lu.hpp"

namespace homog {

BoxGrid::BoxGrid(int dim, int cells) : dim_(dim), cells_(cells) {
    if (dim < 1 || dim > 3) throw ValidationError("dimension", "box dimension must be 1, 2 or 3");
    if (cells < 2) throw ValidationError("grid", "box grid needs at least 2 cells per axis");
    const auto m = static_cast<std::size_t>(cells + 1);
    size_ = 1;
    for (int i = dim - 1; i >= 0; --i) {
        stride_[static_cast<std::size_t>(i)] = size_;
        size_ *= m;
    }
}

std::array<int, 3> BoxGrid::multi_index(std::size_t flat) const noexcept {
    std::array<int, 3> out{0, 0, 0};
    for (int i = 0; i < dim_; ++i) {
        const auto s = stride_[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(i)] = static_cast<int>(flat / s);
        flat %= s;
    }
    return out;
}

std::size_t BoxGrid::flat_index(std::array<int, 3> multi) const noexcept {
    std::size_t f = 0;
    for (int i = 0; i < dim_; ++i) f += static_cast<std::size_t>(multi[static_cast<std::size_t>(i)]) * stride_[static_cast<std::size_t>(i)];
    return f;
}

std::array<double, 3> BoxGrid::coordinate(std::size_t flat) const noexcept {
    const auto m = multi_index(flat);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int i = 0; i < dim_; ++i) x[static_cast<std::size_t>(i)] = static_cast<double>(m[static_cast<std::size_t>(i)]) / cells_;
    return x;
}

bool BoxGrid::on_boundary(std::size_t flat) const noexcept {
    const auto m = multi_index(flat);
    for (int i = 0; i < dim_; ++i) {
        const int k = m[static_cast<std::size_t>(i)];
        if (k == 0 || k == cells_) return true;
    }
    return false;
}

BoxFunction as_function(const Polynomial& p) {
    return [p](std::span<const double> x) { return p.evaluate(x); };
}

double DirichletSolution::max_abs() const noexcept {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

namespace {

// Coefficient lookup: packed upper entries at a box node.
using CoefficientAt = std::function<void(const std::array<int, 3>&, double*)>;

DirichletSolution assemble_and_solve(const BoxGrid& grid, const CoefficientAt& coeff, const BoxFunction& f,
                                     const BoxFunction& g, const SolverOptions& options) {
    const int n = grid.dim();
    const double h2 = grid.spacing() * grid.spacing();
    const auto sz = static_cast<std::size_t>(n);

    std::vector<double> values(grid.size(), 0.0);
    std::vector<int> unknown(grid.size(), -1);
    int count = 0;
    for (std::size_t p = 0; p < grid.size(); ++p) {
        const auto x = grid.coordinate(p);
        if (grid.on_boundary(p)) {
            values[p] = g(std::span<const double>(x.data(), sz));
            if (!std::isfinite(values[p])) throw ValidationError("data", "boundary data is not finite");
        } else {
            unknown[p] = count++;
        }
    }

    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(count) * (n == 1 ? 3 : n == 2 ? 9 : 19));
    Eigen::VectorXd b(count);
    std::vector<double> a(static_cast<std::size_t>(n * (n + 1) / 2));

    for (std::size_t p = 0; p < grid.size(); ++p) {
        const int row = unknown[p];
        if (row < 0) continue;
        const auto m = grid.multi_index(p);
        const auto x = grid.coordinate(p);
        b[row] = f(std::span<const double>(x.data(), sz));
        if (!std::isfinite(b[row])) throw ValidationError("data", "source term is not finite");
        coeff(m, a.data());

        auto add = [&](std::array<int, 3> q, double w) {
            const auto flat = grid.flat_index(q);
            if (unknown[flat] >= 0) t.emplace_back(row, unknown[flat], w);
            else b[row] -= w * values[flat];
        };

        for (int i = 0; i < n; ++i) {
            const double aii = a[static_cast<std::size_t>(SymMatrixField::packed_index(n, i, i))] / h2;
            t.emplace_back(row, row, 2.0 * aii);
            for (int s : {1, -1}) {
                auto q = m;
                q[static_cast<std::size_t>(i)] += s;
                add(q, -aii);
            }
            for (int j = i + 1; j < n; ++j) {
                const double w = 2.0 * a[static_cast<std::size_t>(SymMatrixField::packed_index(n, i, j))] * 0.25 / h2;
                if (w == 0.0) continue;
                for (int si : {1, -1}) {
                    for (int sj : {1, -1}) {
                        auto q = m;
                        q[static_cast<std::size_t>(i)] += si;
                        q[static_cast<std::size_t>(j)] += sj;
                        add(q, -w * si * sj);
                    }
                }
            }
        }
    }

    Eigen::SparseMatrix<double> mat(count, count);
    mat.setFromTriplets(t.begin(), t.end());
    const detail::RefinedLU lu(std::move(mat), options);
    const auto sol = lu.solve(b);
    for (std::size_t p = 0; p < grid.size(); ++p)
        if (unknown[p] >= 0) values[p] = sol.x[unknown[p]];
    return {grid, std::move(values), sol.residual};
}

void check_abar(const Eigen::MatrixXd& abar, int n) {
    if (abar.rows() != n || abar.cols() != n) throw ValidationError("matrix", "effective matrix has the wrong size");
    if ((abar - abar.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, abar.cwiseAbs().maxCoeff())) {
        throw ValidationError("matrix", "effective matrix must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(abar);
    if (!(es.eigenvalues().minCoeff() > 0.0)) {
        NumericalError e("spd_violation", "effective matrix is not positive definite");
        e.with("lambda_min", es.eigenvalues().minCoeff());
        throw e;
    }
}

CoefficientAt constant_coefficient(const Eigen::MatrixXd& abar) {
    const int n = static_cast<int>(abar.rows());
    return [abar, n](const std::array<int, 3>&, double* out) {
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) out[SymMatrixField::packed_index(n, i, j)] = abar(i, j);
    };
}

}  // namespace

DirichletSolution solve_oscillatory(const SymMatrixField& a, int inv_eps, int cells_per_period, const BoxFunction& f,
                                    const BoxFunction& g, SolverOptions options) {
    if (inv_eps < 1) throw ValidationError("divisibility", "1/eps must be a positive integer");
    if (cells_per_period < 2) throw ValidationError("divisibility", "eps/h must be an integer >= 2");
    const int nt = a.grid().resolution();
    if (nt % cells_per_period != 0) {
        ValidationError e("divisibility", "torus resolution " + std::to_string(nt) + " is not a multiple of eps/h = " +
                                              std::to_string(cells_per_period) +
                                              "; choose N as a multiple of the cells per period");
        e.with("N", nt).with("cells_per_period", cells_per_period);
        throw e;
    }
    const int n = a.dim();
    const int stride = nt / cells_per_period;
    const BoxGrid grid(n, inv_eps * cells_per_period);
    const auto& tg = a.grid();
    CoefficientAt coeff = [&](const std::array<int, 3>& m, double* out) {
        std::array<int, 3> y{0, 0, 0};
        for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = (m[static_cast<std::size_t>(i)] * stride) % nt;
        const auto node = tg.flat_index(y);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) out[SymMatrixField::packed_index(n, i, j)] = a.entry(i, j)[node];
    };
    return assemble_and_solve(grid, coeff, f, g, options);
}

DirichletSolution solve_effective(const Eigen::MatrixXd& abar, const BoxGrid& grid, const BoxFunction& f,
                                  const BoxFunction& g, SolverOptions options) {
    check_abar(abar, grid.dim());
    return assemble_and_solve(grid, constant_coefficient(abar), f, g, options);
}

Polynomial z_source(const ObstructionTensor& c, const Polynomial& u) {
    const int n = c.dim;
    if (u.dim() > n) throw ValidationError("dimension", "polynomial has more variables than the tensor dimension");
    Polynomial h(n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
                const double ckl = c(k, l, j);
                if (ckl != 0.0) h = h + u.derivative(j).derivative(k).derivative(l) * ckl;
            }
    return h;
}

DirichletSolution solve_z(const Eigen::MatrixXd& abar, const ObstructionTensor& c, const Polynomial& u,
                          const BoxGrid& grid, SolverOptions options) {
    if (c.dim != grid.dim()) throw ValidationError("dimension", "tensor and grid dimensions differ");
    const Polynomial h = z_source(c, u);
    return solve_effective(abar, grid, as_function(h), [](std::span<const double>) { return 0.0; }, options);
}

DirichletSolution solve_z(const Eigen::MatrixXd& abar, const ObstructionTensor& c, const DirichletSolution& u,
                          SolverOptions options) {
    const auto& grid = u.grid;
    const int n = grid.dim();
    if (c.dim != n) throw ValidationError("dimension", "tensor and grid dimensions differ");
    if (grid.cells() < 4) throw ValidationError("grid", "third differences need at least 4 cells per axis");
    const double h = grid.spacing();

    // 1D weights for derivative multiplicity 0..3, offsets -2..2
    const double w[4][5] = {
        {0, 0, 1, 0, 0},
        {0, -0.5 / h, 0, 0.5 / h, 0},
        {0, 1 / (h * h), -2 / (h * h), 1 / (h * h), 0},
        {-0.5 / (h * h * h), 1 / (h * h * h), 0, -1 / (h * h * h), 0.5 / (h * h * h)},
    };

    // combined coefficient of each multiplicity pattern
    std::map<std::array<int, 3>, double> patterns;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
                std::array<int, 3> mult{0, 0, 0};
                ++mult[static_cast<std::size_t>(j)];
                ++mult[static_cast<std::size_t>(k)];
                ++mult[static_cast<std::size_t>(l)];
                patterns[mult] += c(k, l, j);
            }

    std::vector<double> src(grid.size(), 0.0);
    for (std::size_t p = 0; p < grid.size(); ++p) {
        if (grid.on_boundary(p)) continue;
        auto center = grid.multi_index(p);
        for (int i = 0; i < n; ++i) {
            auto& k = center[static_cast<std::size_t>(i)];
            k = std::clamp(k, 2, grid.cells() - 2);
        }
        double total = 0.0;
        for (const auto& [mult, coef] : patterns) {
            if (coef == 0.0) continue;
            double d = 0.0;
            const int span = n == 1 ? 5 : n == 2 ? 25 : 125;
            for (int s = 0; s < span; ++s) {
                std::array<int, 3> off{s % 5 - 2, (s / 5) % 5 - 2, (s / 25) % 5 - 2};
                double weight = 1.0;
                auto q = center;
                for (int i = 0; i < n; ++i) {
                    weight *= w[mult[static_cast<std::size_t>(i)]][off[static_cast<std::size_t>(i)] + 2];
                    q[static_cast<std::size_t>(i)] += off[static_cast<std::size_t>(i)];
                }
                if (weight != 0.0) d += weight * u.at(q);
            }
            total += coef * d;
        }
        src[p] = total;
    }
    check_abar(abar, n);
    // source lookup by coordinate: snap back to the node
    const double cells = grid.cells();
    BoxFunction f = [&](std::span<const double> x) {
        std::array<int, 3> m{0, 0, 0};
        for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)] = static_cast<int>(std::lround(x[static_cast<std::size_t>(i)] * cells));
        return src[grid.flat_index(m)];
    };
    return assemble_and_solve(grid, constant_coefficient(abar), f, [](std::span<const double>) { return 0.0; }, options);
}

void write_csv(std::ostream& out, const DirichletSolution& s) {
    const int n = s.grid.dim();
    for (int i = 0; i < n; ++i) out << 'x' << (i + 1) << ',';
    out << "value\n";
    char buf[40];
    for (std::size_t p = 0; p < s.grid.size(); ++p) {
        const auto x = s.grid.coordinate(p);
        for (int i = 0; i < n; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", x[static_cast<std::size_t>(i)]);
            out << buf << ',';
        }
        std::snprintf(buf, sizeof buf, "%.17g", s.values[p]);
        out << buf << '\n';
    }
}

}  // namespace homog

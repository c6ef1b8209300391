#include "homog/torus_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "homog/error.hpp"

namespace homog {

PeriodicGrid::PeriodicGrid(int dim, int resolution) : dim_(dim), n_(resolution) {
    if (dim < 1 || dim > 3) {
        throw ValidationError("grid", "torus dimension must be 1, 2 or 3, got " + std::to_string(dim));
    }
    if (resolution < 4 || resolution % 2 != 0) {
        throw ValidationError("grid", "torus resolution must be even and >= 4, got " +
                                          std::to_string(resolution));
    }
    size_ = 1;
    for (int d = dim_ - 1; d >= 0; --d) {
        stride_[d] = size_;
        size_ *= static_cast<std::size_t>(n_);
    }
}

double PeriodicGrid::cell_volume() const noexcept { return std::pow(spacing(), dim_); }

std::array<int, 3> PeriodicGrid::multi_index(std::size_t flat) const noexcept {
    std::array<int, 3> m{0, 0, 0};
    for (int d = 0; d < dim_; ++d) {
        m[d] = static_cast<int>((flat / stride_[d]) % n_);
    }
    return m;
}

std::size_t PeriodicGrid::flat_index(std::array<int, 3> multi) const noexcept {
    std::size_t flat = 0;
    for (int d = 0; d < dim_; ++d) {
        int i = multi[d] % n_;
        if (i < 0) i += n_;
        flat += static_cast<std::size_t>(i) * stride_[d];
    }
    return flat;
}

std::array<double, 3> PeriodicGrid::coordinate(std::size_t flat) const noexcept {
    auto m = multi_index(flat);
    std::array<double, 3> y{0.0, 0.0, 0.0};
    for (int d = 0; d < dim_; ++d) y[d] = m[d] * spacing();
    return y;
}

std::size_t PeriodicGrid::neighbor(std::size_t flat, int axis, int offset) const noexcept {
    const int i = static_cast<int>((flat / stride_[axis]) % n_);
    int j = (i + offset) % n_;
    if (j < 0) j += n_;
    return flat + (static_cast<std::ptrdiff_t>(j) - i) * static_cast<std::ptrdiff_t>(stride_[axis]);
}

// ---------------------------------------------------------------------------

ScalarField::ScalarField(const PeriodicGrid& grid) : grid_(grid), values_(grid.size(), 0.0) {}

ScalarField::ScalarField(const PeriodicGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw ValidationError("field", "value count " + std::to_string(values_.size()) +
                                           " does not match grid size " + std::to_string(grid_.size()));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw NumericalError("non_finite", "scalar field has a non-finite value");
    }
}

ScalarField ScalarField::constant(const PeriodicGrid& grid, double value) {
    return ScalarField(grid, std::vector<double>(grid.size(), value));
}

ScalarField ScalarField::sample(const PeriodicGrid& grid,
                                const std::function<double(std::span<const double>)>& f) {
    std::vector<double> v(grid.size());
    for (std::size_t p = 0; p < grid.size(); ++p) {
        auto y = grid.coordinate(p);
        v[p] = f(std::span<const double>(y.data(), grid.dim()));
    }
    return ScalarField(grid, std::move(v));
}

double ScalarField::max_abs() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double ScalarField::min() const noexcept { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const noexcept { return *std::max_element(values_.begin(), values_.end()); }

namespace {

template <class Op>
ScalarField zip(const ScalarField& a, const ScalarField& b, Op op) {
    if (!(a.grid() == b.grid())) throw ValidationError("field", "fields live on different grids");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(a[i], b[i]);
    return ScalarField(a.grid(), std::move(out));
}

}  // namespace

ScalarField ScalarField::operator+(const ScalarField& o) const { return zip(*this, o, std::plus<>()); }
ScalarField ScalarField::operator-(const ScalarField& o) const { return zip(*this, o, std::minus<>()); }
ScalarField ScalarField::operator*(const ScalarField& o) const { return zip(*this, o, std::multiplies<>()); }
ScalarField ScalarField::operator/(const ScalarField& o) const { return zip(*this, o, std::divides<>()); }
ScalarField ScalarField::operator*(double s) const {
    return map([s](double v) { return v * s; });
}
ScalarField ScalarField::operator+(double s) const {
    return map([s](double v) { return v + s; });
}

ScalarField ScalarField::map(const std::function<double(double)>& fn) const {
    std::vector<double> out(values_.size());
    std::transform(values_.begin(), values_.end(), out.begin(), fn);
    return ScalarField(grid_, std::move(out));
}

// ---------------------------------------------------------------------------

int SymMatrixField::packed_index(int dim, int i, int j) noexcept {
    if (i > j) std::swap(i, j);
    // rows 0..i-1 contribute dim, dim-1, ... entries
    return i * dim - i * (i - 1) / 2 + (j - i);
}

SymMatrixField::SymMatrixField(const PeriodicGrid& grid, std::vector<ScalarField> upper)
    : grid_(grid), upper_(std::move(upper)) {
    const int n = grid_.dim();
    if (static_cast<int>(upper_.size()) != n * (n + 1) / 2) {
        throw ValidationError("matrix_field", "expected " + std::to_string(n * (n + 1) / 2) +
                                                  " upper-triangular entries");
    }
    for (const auto& e : upper_) {
        if (!(e.grid() == grid_)) throw ValidationError("matrix_field", "entry lives on a different grid");
    }
    lambda_min_ = std::numeric_limits<double>::infinity();
    lambda_max_ = -std::numeric_limits<double>::infinity();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    for (std::size_t p = 0; p < grid_.size(); ++p) {
        es.compute(at(p), Eigen::EigenvaluesOnly);
        lambda_min_ = std::min(lambda_min_, es.eigenvalues().minCoeff());
        lambda_max_ = std::max(lambda_max_, es.eigenvalues().maxCoeff());
    }
    if (!(lambda_min_ > 0.0)) {
        NumericalError err("spd_violation", "coefficient field is not positive definite on the grid");
        err.with("lambda_min", lambda_min_);
        throw err;
    }
}

SymMatrixField SymMatrixField::constant(const PeriodicGrid& grid, const Eigen::MatrixXd& m) {
    const int n = grid.dim();
    std::vector<ScalarField> upper;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) upper.push_back(ScalarField::constant(grid, 0.5 * (m(i, j) + m(j, i))));
    return SymMatrixField(grid, std::move(upper));
}

const ScalarField& SymMatrixField::entry(int i, int j) const {
    if (i < 0 || j < 0 || i >= dim() || j >= dim()) {
        throw ValidationError("axis", "matrix entry index out of range");
    }
    return upper_[packed_index(dim(), i, j)];
}

Eigen::MatrixXd SymMatrixField::at(std::size_t node) const {
    const int n = dim();
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) m(i, j) = m(j, i) = upper_[packed_index(n, i, j)][node];
    return m;
}

double SymMatrixField::sup_norm() const noexcept {
    double s = 0.0;
    for (const auto& e : upper_) s = std::max(s, e.max_abs());
    return s;
}

SymMatrixField SymMatrixField::scaled(const ScalarField& gamma) const {
    std::vector<ScalarField> upper;
    upper.reserve(upper_.size());
    for (const auto& e : upper_) upper.push_back(e * gamma);
    return SymMatrixField(grid_, std::move(upper));
}

SymMatrixField SymMatrixField::scaled(double s) const {
    std::vector<ScalarField> upper;
    upper.reserve(upper_.size());
    for (const auto& e : upper_) upper.push_back(e * s);
    return SymMatrixField(grid_, std::move(upper));
}

// ---------------------------------------------------------------------------

namespace {

void check_axis(const PeriodicGrid& g, int axis) {
    if (axis < 0 || axis >= g.dim()) {
        throw ValidationError("axis", "axis " + std::to_string(axis) + " out of range for dimension " +
                                          std::to_string(g.dim()));
    }
}

}  // namespace

ScalarField derivative(const ScalarField& f, int axis) {
    const auto& g = f.grid();
    check_axis(g, axis);
    const double inv2h = 0.5 / g.spacing();
    std::vector<double> out(g.size());
    for (std::size_t p = 0; p < g.size(); ++p) {
        out[p] = (f[g.neighbor(p, axis, 1)] - f[g.neighbor(p, axis, -1)]) * inv2h;
    }
    return ScalarField(g, std::move(out));
}

ScalarField second_derivative(const ScalarField& f, int axis_i, int axis_j) {
    const auto& g = f.grid();
    check_axis(g, axis_i);
    check_axis(g, axis_j);
    const double h = g.spacing();
    std::vector<double> out(g.size());
    if (axis_i == axis_j) {
        const double inv = 1.0 / (h * h);
        for (std::size_t p = 0; p < g.size(); ++p) {
            out[p] = (f[g.neighbor(p, axis_i, 1)] - 2.0 * f[p] + f[g.neighbor(p, axis_i, -1)]) * inv;
        }
    } else {
        const double inv = 0.25 / (h * h);
        for (std::size_t p = 0; p < g.size(); ++p) {
            const auto pp = g.neighbor(p, axis_i, 1);
            const auto pm = g.neighbor(p, axis_i, -1);
            out[p] = (f[g.neighbor(pp, axis_j, 1)] - f[g.neighbor(pp, axis_j, -1)] -
                      f[g.neighbor(pm, axis_j, 1)] + f[g.neighbor(pm, axis_j, -1)]) *
                     inv;
        }
    }
    return ScalarField(g, std::move(out));
}

double integrate(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.values()) s += v;
    return s * f.grid().cell_volume();
}

ScalarField shift_reflect(const ScalarField& f, std::span<const double> center) {
    const auto& g = f.grid();
    if (static_cast<int>(center.size()) != g.dim()) {
        throw ValidationError("center", "reflection center must have one component per axis");
    }
    // 2 c / h rounded: the node offset of the reflection
    std::array<int, 3> twice{0, 0, 0};
    for (int d = 0; d < g.dim(); ++d) {
        twice[d] = static_cast<int>(std::lround(2.0 * center[d] / g.spacing()));
    }
    std::vector<double> out(g.size());
    for (std::size_t p = 0; p < g.size(); ++p) {
        auto m = g.multi_index(p);
        std::array<int, 3> r{0, 0, 0};
        for (int d = 0; d < g.dim(); ++d) r[d] = twice[d] - m[d];
        out[p] = f[g.flat_index(r)];
    }
    return ScalarField(g, std::move(out));
}

double l2_norm(const ScalarField& f) { return std::sqrt(integrate(f * f)); }

}  // namespace homog

#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace homog {

/// Uniform grid on the unit torus T^n, n in {1,2,3}, with N nodes per axis.
///
/// Node (i_0, ..., i_{n-1}) sits at coordinate (i_0 h, ..., i_{n-1} h), h = 1/N.
/// Flat indices are row-major with the last axis fastest.
class PeriodicGrid {
public:
    PeriodicGrid(int dim, int resolution);

    int dim() const noexcept { return dim_; }
    int resolution() const noexcept { return n_; }
    double spacing() const noexcept { return 1.0 / n_; }
    std::size_t size() const noexcept { return size_; }

    /// Cell volume h^n, the rectangle-rule weight.
    double cell_volume() const noexcept;

    std::array<int, 3> multi_index(std::size_t flat) const noexcept;
    /// Flat index of a multi-index; components are wrapped mod N.
    std::size_t flat_index(std::array<int, 3> multi) const noexcept;
    std::array<double, 3> coordinate(std::size_t flat) const noexcept;
    /// Flat index of the node `offset` steps along `axis` from `flat`.
    std::size_t neighbor(std::size_t flat, int axis, int offset) const noexcept;

    bool operator==(const PeriodicGrid&) const = default;

private:
    int dim_;
    int n_;
    std::size_t size_;
    std::array<std::size_t, 3> stride_{};
};

/// Node values of a periodic scalar function.
class ScalarField {
public:
    explicit ScalarField(const PeriodicGrid& grid);  // zero field
    ScalarField(const PeriodicGrid& grid, std::vector<double> values);

    static ScalarField constant(const PeriodicGrid& grid, double value);
    static ScalarField sample(const PeriodicGrid& grid,
                              const std::function<double(std::span<const double>)>& f);

    const PeriodicGrid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }

    Eigen::Map<const Eigen::VectorXd> vector() const noexcept {
        return {values_.data(), static_cast<Eigen::Index>(values_.size())};
    }

    double max_abs() const noexcept;
    double min() const noexcept;
    double max() const noexcept;

    ScalarField operator+(const ScalarField& o) const;
    ScalarField operator-(const ScalarField& o) const;
    ScalarField operator*(const ScalarField& o) const;  // pointwise
    ScalarField operator/(const ScalarField& o) const;  // pointwise
    ScalarField operator*(double s) const;
    ScalarField operator+(double s) const;
    ScalarField map(const std::function<double(double)>& fn) const;

private:
    PeriodicGrid grid_;
    std::vector<double> values_;
};

inline ScalarField operator*(double s, const ScalarField& f) { return f * s; }

/// Symmetric matrix-valued periodic field; stores a_ij for i <= j only.
///
/// Construction rejects non-finite entries and any node whose smallest
/// eigenvalue is not strictly positive.
class SymMatrixField {
public:
    /// `upper` holds n(n+1)/2 fields in the order a11, a12, .., a1n, a22, ...
    SymMatrixField(const PeriodicGrid& grid, std::vector<ScalarField> upper);

    static SymMatrixField constant(const PeriodicGrid& grid, const Eigen::MatrixXd& m);

    const PeriodicGrid& grid() const noexcept { return grid_; }
    int dim() const noexcept { return grid_.dim(); }
    const ScalarField& entry(int i, int j) const;
    Eigen::MatrixXd at(std::size_t node) const;

    /// Smallest and largest pointwise eigenvalue over all nodes.
    double lambda_min() const noexcept { return lambda_min_; }
    double lambda_max() const noexcept { return lambda_max_; }
    /// max over nodes and entries of |a_ij|.
    double sup_norm() const noexcept;

    SymMatrixField scaled(const ScalarField& gamma) const;
    SymMatrixField scaled(double s) const;

    static int packed_index(int dim, int i, int j) noexcept;

private:
    PeriodicGrid grid_;
    std::vector<ScalarField> upper_;
    double lambda_min_ = 0.0;
    double lambda_max_ = 0.0;
};

/// Second-order centered difference along `axis` with periodic wrap.
ScalarField derivative(const ScalarField& f, int axis);

/// 3-point second difference for i == j, composed centered differences for i != j.
ScalarField second_derivative(const ScalarField& f, int axis_i, int axis_j);

/// Rectangle rule h^n * sum of node values.
double integrate(const ScalarField& f);

/// y -> f(2 center - y). Each center component is snapped to the nearest
/// multiple of h/2 so that the reflection maps nodes onto nodes.
ScalarField shift_reflect(const ScalarField& f, std::span<const double> center);

/// sqrt(integrate(f^2)).
double l2_norm(const ScalarField& f);

}  // namespace homog

#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "homog/expression.hpp"
#include "homog/periodic_solver.hpp"
#include "homog/torus_field.hpp"

namespace homog {

struct CoefficientSpec;

namespace spec {

struct Identity {};

/// A = a(y) I.
struct ScalarTimesIdentity {
    std::string a;
};

/// A = diag(a_1(y_1), ..., a_n(y_n)).
struct DiagonalSeparable {
    std::vector<std::string> a;
};

/// A = diag(a_1, ..., a_n) with a_i independent of y_i.
struct DiagonalMissingOwn {
    std::vector<std::string> a;
};

/// A = A(y_1). Full symmetric matrix of expressions, row-major n*n.
struct Layered {
    std::vector<std::string> entries;
};

/// Arbitrary symmetric matrix of expressions, row-major n*n.
struct Expression {
    std::vector<std::string> entries;
};

/// A(y) = (E(y - x) + E(x - y)) / 2, even about x.
struct ShiftedEven {
    std::vector<std::string> entries;
    std::vector<double> center;
};

/// diag(a1, a2) built from A0 = diag(1, alpha) and v = s d_1 r0.
struct Prop31 {
    std::string alpha = "exp(0.03*sin(2*pi*y1)*sin(2*pi*y2))";
    double s = 0.02;
};

/// Two-step perturbation of a base matrix; xi is an expression in t.
struct Thm16 {
    std::shared_ptr<const CoefficientSpec> base;
    double delta = 0.1;
    double s = 0.005;
    std::string xi = "0.2*sin(2*pi*t)";
};

/// diag(a1, s a2).
struct ASFamily {
    std::string a1 = "1";
    std::string a2 = "1+0.5*sin(2*pi*(y1+y2))";
    double s = 10.0;
};

}  // namespace spec

/// Symbolic description of a coefficient field; realized on a grid by `realize`.
struct CoefficientSpec {
    using Params = std::variant<spec::Identity, spec::ScalarTimesIdentity, spec::DiagonalSeparable,
                                spec::DiagonalMissingOwn, spec::Layered, spec::Expression, spec::ShiftedEven,
                                spec::Prop31, spec::Thm16, spec::ASFamily>;

    int dim = 2;
    Params params;

    /// Schema name of the variant ("identity", "prop31_bad", ...).
    std::string variant() const;
};

/// Checks dimensions, expression syntax and variable dependence; throws ValidationError.
void validate(const CoefficientSpec& spec);

/// Samples the family on `grid` (whose dimension must match). SPD is checked.
/// Constructions that need an invariant measure use `tol` for it.
SymMatrixField realize(const CoefficientSpec& spec, const PeriodicGrid& grid, double tol = kDefaultTol);

/// Samples an expression in y1..yn at every node; non-finite values are a ValidationError.
ScalarField sample_expression(const homog::Expression& e, const PeriodicGrid& grid);
ScalarField sample_expression(const std::string& source, const PeriodicGrid& grid);

// ---------------------------------------------------------------------------

struct Prop31Construction {
    SymMatrixField a;
    InvariantMeasure r0;
    ScalarField v;
    /// -s * integral (d_1 r0)^2
    double predicted_c111 = 0.0;
    /// max |v_11 + alpha v_22| at the requested s; must be <= 1/2
    double smallness = 0.0;
    double max_admissible_s = 0.0;
};

/// Rejects alpha with (log alpha)_{12} == 0, a degenerate r0, or s above the
/// admissible maximum (reported in the error details).
Prop31Construction prop31_bad(const std::string& alpha, double s, const PeriodicGrid& grid,
                              double tol = kDefaultTol);

struct Thm16Step1 {
    SymMatrixField a1;
    InvariantMeasure r1;
    /// First axis j with (a1_ij r1)_{y_i} nonzero.
    int j = 0;
    double delta = 0.0;
    bool unchanged = false;
    std::vector<std::string> warnings;
};

/// A1 = A0 + delta xi(y1+y2)/r0 diag(1, -1). Returns A0 unchanged when A0
/// already has a nonvanishing divergence field. With `allow_shrink` an SPD
/// failure halves delta (up to 20 times) and records a warning.
Thm16Step1 thm16_step1(const SymMatrixField& a0, double delta, const std::string& xi, bool allow_shrink = false,
                       double tol = kDefaultTol);

struct Thm16Step2 {
    SymMatrixField a;
    ScalarField gamma;
    ScalarField phi;
    InvariantMeasure r;
    /// c^{jj}_j(A1) - s abar1_jj integral b_j^2
    double predicted_c = 0.0;
    double c_a1 = 0.0;
    double abar1_jj = 0.0;
    double max_admissible_s = 0.0;
};

/// A = gamma A1, gamma = 1/(1 + a1_ij phi_ij), phi = s (a1_ij r1)_{y_i}.
Thm16Step2 thm16_step2(const Thm16Step1& step1, double s, double tol = kDefaultTol);

SymMatrixField a_s_family(const std::string& a1, const std::string& a2, double s, const PeriodicGrid& grid);

/// B / (a2(y) * integral_0^1 a1/a2 dy2), normalized to unit mass.
ScalarField limit_measure(const std::string& a1, const std::string& a2, const PeriodicGrid& grid);

/// Smallest eigenvalue margin of a realized field, for reporting.
double spd_margin(const SymMatrixField& a);

/// Default spec for a schema variant name (aliases: "prop31", "thm16", "a_s").
CoefficientSpec default_spec(const std::string& variant, int dim);

}  // namespace homog

#pragma once

#include <array>
#include <map>
#include <span>
#include <string>

namespace homog {

/// Sparse real polynomial in x1..xn (n <= 3), exact derivatives.
class Polynomial {
public:
    using Exponents = std::array<int, 3>;

    explicit Polynomial(int dim = 1) : dim_(dim) {}

    static Polynomial constant(int dim, double c);
    /// x_{axis+1}
    static Polynomial coordinate(int dim, int axis);
    static Polynomial monomial(int dim, double c, Exponents e);

    int dim() const noexcept { return dim_; }
    const std::map<Exponents, double>& terms() const noexcept { return terms_; }

    double evaluate(std::span<const double> x) const;
    double operator()(std::span<const double> x) const { return evaluate(x); }

    Polynomial derivative(int axis) const;
    int degree() const noexcept;
    bool is_zero() const noexcept { return terms_.empty(); }

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator*(double s) const;

    /// e.g. "-2*x1 + x1^3"
    std::string to_string() const;

private:
    void add_term(const Exponents& e, double c);

    int dim_;
    std::map<Exponents, double> terms_;
};

}  // namespace homog

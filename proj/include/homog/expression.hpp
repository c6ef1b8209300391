#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "homog/error.hpp"

namespace homog {

/// Syntax error at a byte offset of the source string.
class ParseError : public ValidationError {
public:
    ParseError(const std::string& message, std::size_t position)
        : ValidationError("parse", message + " at position " + std::to_string(position)), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Parsed real-valued expression over a fixed list of named variables.
///
/// Grammar, loosest binding first, all binary operators left-associative:
///
///     sum     := product (('+' | '-') product)*
///     product := unary (('*' | '/') unary)*
///     unary   := '-' unary | '+' unary | power
///     power   := primary ('^' exponent)*
///     exponent:= '-' exponent | primary
///     primary := number | 'pi' | variable | func '(' sum ')' | '(' sum ')'
///
/// so -2^2 == -4 and 2^3^2 == 64. Functions: sin cos tan exp log sqrt abs.
class Expression {
public:
    struct Node;

    static Expression parse(std::string_view source, std::vector<std::string> variables);
    static Expression constant(double value);

    /// `values[i]` is bound to `variables()[i]`.
    double evaluate(std::span<const double> values) const;
    double operator()(std::span<const double> values) const { return evaluate(values); }

    /// Canonical source form; parsing it back yields an equivalent expression.
    std::string to_string() const;

    const std::vector<std::string>& variables() const noexcept { return variables_; }
    bool depends_on(std::string_view variable) const;

private:
    Expression(std::shared_ptr<const Node> root, std::vector<std::string> variables)
        : root_(std::move(root)), variables_(std::move(variables)) {}

    std::shared_ptr<const Node> root_;
    std::vector<std::string> variables_;
};

/// Parses a torus coefficient expression in y1..yn.
Expression parse_expression(std::string_view source, int dim);

/// The variable names y1..yn (or x1..xn with prefix "x").
std::vector<std::string> coordinate_names(int dim, std::string_view prefix = "y");

}  // namespace homog

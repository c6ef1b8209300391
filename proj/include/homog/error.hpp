#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace homog {

/// Base of all library errors. `kind` is a stable machine-readable tag.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

    /// Named numeric diagnostics attached to the error (e.g. the maximal
    /// admissible value of a rejected parameter).
    const std::vector<std::pair<std::string, double>>& details() const noexcept { return details_; }

    Error& with(std::string key, double value) {
        details_.emplace_back(std::move(key), value);
        return *this;
    }

private:
    std::string kind_;
    std::vector<std::pair<std::string, double>> details_;
};

/// Bad input: out-of-range axis, malformed expression, divisibility violation.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// The numerics failed: non-convergence, SPD violation, loss of positivity.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace homog

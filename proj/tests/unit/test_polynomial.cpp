#include <doctest.h>

#include <array>

#include "homog/polynomial.hpp"

using homog::Polynomial;

TEST_SUITE("polynomial") {
    TEST_CASE("construction, evaluation, printing") {
        const auto x = Polynomial::coordinate(2, 0);
        const auto y = Polynomial::coordinate(2, 1);
        const auto p = x * x * y * 3.0 - x + Polynomial::constant(2, 2.0);
        std::array<double, 2> at{2.0, -1.0};
        CHECK(p.evaluate(at) == 3.0 * 4 * -1 - 2 + 2);
        CHECK(p.degree() == 3);
        CHECK(p.to_string() == "3*x1^2*x2 - x1 + 2");
        CHECK(Polynomial(2).to_string() == "0");
        CHECK((p - p).is_zero());
        CHECK(Polynomial::monomial(3, 0.0, {1, 1, 1}).is_zero());
    }

    TEST_CASE("exact derivatives") {
        const auto x = Polynomial::coordinate(3, 0);
        const auto y = Polynomial::coordinate(3, 1);
        const auto z = Polynomial::coordinate(3, 2);
        const auto u = x * y * z + x * x * x;
        CHECK(u.derivative(0).to_string() == "3*x1^2 + x2*x3");
        CHECK(u.derivative(0).derivative(1).derivative(2).to_string() == "1");
        CHECK(u.derivative(0).derivative(0).derivative(0).to_string() == "6");
        CHECK(u.derivative(1).derivative(1).is_zero());
        // mixed derivatives commute
        CHECK((u.derivative(0).derivative(2) - u.derivative(2).derivative(0)).is_zero());
    }
}

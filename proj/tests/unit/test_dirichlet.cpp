#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "dense_oracle.hpp"
#include "homog/dirichlet.hpp"
#include "homog/error.hpp"
#include "homog/gallery.hpp"

using namespace homog;

namespace {

constexpr double tau = 2 * std::numbers::pi;

double max_error(const DirichletSolution& s, const BoxFunction& u) {
    double e = 0.0;
    for (std::size_t p = 0; p < s.grid.size(); ++p) {
        const auto x = s.grid.coordinate(p);
        e = std::max(e, std::abs(s.values[p] - u(std::span<const double>(x.data(), 3))));
    }
    return e;
}

BoxFunction constant(double c) {
    return [c](std::span<const double>) { return c; };
}

Eigen::MatrixXd abar2() {
    Eigen::MatrixXd m(2, 2);
    m << 1.3, 0.4, 0.4, 0.8;
    return m;
}

}  // namespace

TEST_SUITE("dirichlet") {
    TEST_CASE("box grid indexing") {
        const BoxGrid g(2, 4);
        CHECK(g.size() == 25);
        CHECK(g.flat_index({1, 2, 0}) == 7);
        CHECK(g.on_boundary(g.flat_index({0, 2, 0})));
        CHECK(g.on_boundary(g.flat_index({3, 4, 0})));
        CHECK_FALSE(g.on_boundary(g.flat_index({1, 3, 0})));
        CHECK(g.coordinate(7)[1] == 0.5);
        CHECK_THROWS_AS(BoxGrid(2, 1), ValidationError);
        CHECK_THROWS_AS(BoxGrid(4, 8), ValidationError);
    }

    TEST_CASE("effective solve is exact on quadratics and cubics") {
        const auto A = abar2();
        const auto x = Polynomial::coordinate(2, 0);
        const auto y = Polynomial::coordinate(2, 1);
        for (const auto& u : {x * x + y * 2.0, x * y, x * x * x - x * y * y, x * x * y + Polynomial::constant(2, 1.0)}) {
            CAPTURE(u.to_string());
            Polynomial f(2);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) f = f - u.derivative(i).derivative(j) * A(i, j);
            const auto s = solve_effective(A, BoxGrid(2, 8), as_function(f), as_function(u));
            CHECK(max_error(s, as_function(u)) < 1e-12);
        }
        // 1D and 3D
        Eigen::MatrixXd a1(1, 1);
        a1 << 2.0;
        const auto x1 = Polynomial::coordinate(1, 0);
        const auto u1 = x1 * x1 * x1;
        const auto s1 = solve_effective(a1, BoxGrid(1, 10), as_function(x1 * -12.0), as_function(u1));
        CHECK(max_error(s1, as_function(u1)) < 1e-12);
        const auto x3 = Polynomial::coordinate(3, 0) * Polynomial::coordinate(3, 1) * Polynomial::coordinate(3, 2);
        const auto s3 = solve_effective(Eigen::MatrixXd::Identity(3, 3), BoxGrid(3, 6), constant(0.0), as_function(x3));
        CHECK(max_error(s3, as_function(x3)) < 1e-12);
        CHECK_THROWS_AS(solve_effective(Eigen::MatrixXd::Identity(3, 3), BoxGrid(2, 6), constant(0.0), constant(0.0)),
                        ValidationError);
    }

    TEST_CASE("dense reference: constant coefficient z problem") {
        // frozen from tests/oracles/make_oracles.py: -Laplace z = 1, z = 0 on the boundary, 16 cells
        ObstructionTensor c{2, std::vector<double>(8, 0.0), 0.0};
        c.c[0] = 1.0;
        const auto u = Polynomial::monomial(2, 1.0 / 6.0, {3, 0, 0});
        CHECK(z_source(c, u).to_string() == "1");
        const auto z = solve_z(Eigen::MatrixXd::Identity(2, 2), c, u, BoxGrid(2, 16));
        CHECK(z.at({8, 8, 0}) == doctest::Approx(0.07344576657891969).epsilon(1e-12));
        CHECK(z.at({4, 8, 0}) == doctest::Approx(0.057159370938041576).epsilon(1e-12));
        // maximum principle: zero boundary, positive source
        CHECK(*std::min_element(z.values.begin(), z.values.end()) >= 0.0);
        CHECK(z.max_abs() == z.at({8, 8, 0}));
    }

    TEST_CASE("dense reference: oscillatory solve") {
        const auto a = realize(default_spec("expression", 2), PeriodicGrid(2, 8));
        const BoxFunction f = [](std::span<const double> x) { return 1.0 + x[0]; };
        const BoxFunction g = [](std::span<const double> x) { return x[0] * x[1]; };
        const auto s = solve_oscillatory(a, 2, 8, f, g);
        CHECK(s.grid.cells() == 16);
        CHECK(s.at({8, 8, 0}) == doctest::Approx(0.3220558166052454).epsilon(1e-12));
        CHECK(s.at({3, 11, 0}) == doctest::Approx(0.16462440287589483).epsilon(1e-12));

        const auto dense = oracle::dense_box(
            [](int i, int j) {
                const double y1 = (i % 8) / 8.0, y2 = (j % 8) / 8.0;
                return Eigen::Vector3d(1.5 + 0.5 * std::sin(tau * y2), 0.2 * std::sin(tau * (y1 + y2)),
                                       1.5 + 0.5 * std::sin(tau * y1));
            },
            [](double x, double) { return 1.0 + x; }, [](double x, double y) { return x * y; }, 16);
        CHECK((Eigen::Map<const Eigen::VectorXd>(s.values.data(), 289) - dense).lpNorm<Eigen::Infinity>() < 1e-10);
    }

    TEST_CASE("oscillatory grids must line up with the torus") {
        const auto a = realize(default_spec("expression", 2), PeriodicGrid(2, 16));
        try {
            (void)solve_oscillatory(a, 2, 6, constant(1.0), constant(0.0));
            FAIL("expected a divisibility error");
        } catch (const ValidationError& e) {
            CHECK(e.kind() == "divisibility");
        }
        CHECK_THROWS_AS(solve_oscillatory(a, 0, 8, constant(1.0), constant(0.0)), ValidationError);
        // a coarser sampling of the same torus: stride 2
        CHECK_NOTHROW(solve_oscillatory(a, 2, 8, constant(1.0), constant(0.0)));
    }

    TEST_CASE("maximum principle for the oscillatory operator") {
        const auto a = realize(default_spec("scalar_times_identity", 2), PeriodicGrid(2, 8));
        const auto s = solve_oscillatory(a, 2, 8, constant(-1.0), constant(0.5));
        CHECK(*std::max_element(s.values.begin(), s.values.end()) <= 0.5 + 1e-14);
    }

    TEST_CASE("z source is constant for cubic data") {
        const auto res_c = ObstructionTensor{2, {0.1, -0.2, 0.3, 0.05, 0.3, 0.05, 0.7, -0.4}, 0.0};
        const auto x = Polynomial::coordinate(2, 0);
        const auto y = Polynomial::coordinate(2, 1);
        // u = x1^2 x2: u_112 = 2 in every order
        const auto h = z_source(res_c, x * x * y);
        CHECK(h.degree() == 0);
        double expect = 0.0;
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) {
                    const int ones = (j == 0) + (k == 0) + (l == 0);
                    if (ones == 2) expect += 2.0 * res_c(k, l, j);
                }
        std::array<double, 2> at{0.3, 0.6};
        CHECK(h.evaluate(at) == doctest::Approx(expect));
    }

    TEST_CASE("grid-function z agrees with the polynomial one for cubics") {
        ObstructionTensor c{2, {0.1, -0.2, 0.3, 0.05, 0.3, 0.05, 0.7, -0.4}, 0.0};
        const auto x = Polynomial::coordinate(2, 0);
        const auto y = Polynomial::coordinate(2, 1);
        const auto u = x * x * y - y * y * y;
        const BoxGrid grid(2, 12);
        const auto A = abar2();
        Polynomial f(2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) f = f - u.derivative(i).derivative(j) * A(i, j);
        const auto uh = solve_effective(A, grid, as_function(f), as_function(u));
        const auto z1 = solve_z(A, c, u, grid);
        const auto z2 = solve_z(A, c, uh);
        double d = 0.0;
        for (std::size_t p = 0; p < grid.size(); ++p) d = std::max(d, std::abs(z1.values[p] - z2.values[p]));
        CHECK(d < 1e-8);
    }

    TEST_CASE("csv output") {
        const auto s = solve_effective(Eigen::MatrixXd::Identity(2, 2), BoxGrid(2, 4), constant(0.0), constant(1.0));
        std::ostringstream os;
        write_csv(os, s);
        const auto text = os.str();
        CHECK(text.rfind("x1,x2,value\n", 0) == 0);
        CHECK(std::count(text.begin(), text.end(), '\n') == 26);
    }
}

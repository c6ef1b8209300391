#include "homog/gallery.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "homog/error.hpp"
#include "homog/homogenize.hpp"

namespace homog {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kSmallness = 0.5;

std::vector<std::string> full_to_packed(const std::vector<std::string>& full, int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) out.push_back(full[static_cast<std::size_t>(i * n + j)]);
    return out;
}

void require_square(const std::vector<std::string>& entries, int n, const char* what) {
    if (entries.size() != static_cast<std::size_t>(n * n)) {
        throw ValidationError("spec", std::string(what) + " needs " + std::to_string(n * n) + " entries");
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const auto a = parse_expression(entries[static_cast<std::size_t>(i * n + j)], n).to_string();
            const auto b = parse_expression(entries[static_cast<std::size_t>(j * n + i)], n).to_string();
            if (a != b) {
                throw ValidationError("spec", std::string(what) + " entries must be symmetric: a" + std::to_string(i + 1) +
                                                  std::to_string(j + 1) + " = " + a + " but a" + std::to_string(j + 1) +
                                                  std::to_string(i + 1) + " = " + b);
            }
        }
    }
}

void require_count(const std::vector<std::string>& a, int n, const char* what) {
    if (a.size() != static_cast<std::size_t>(n)) {
        throw ValidationError("spec", std::string(what) + " needs " + std::to_string(n) + " diagonal entries");
    }
}

SymMatrixField from_packed(const PeriodicGrid& grid, const std::vector<std::string>& packed) {
    std::vector<ScalarField> upper;
    for (const auto& e : packed) upper.push_back(sample_expression(e, grid));
    return SymMatrixField(grid, std::move(upper));
}

SymMatrixField diagonal(const PeriodicGrid& grid, const std::vector<ScalarField>& d) {
    const int n = grid.dim();
    std::vector<ScalarField> upper;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) upper.push_back(i == j ? d[static_cast<std::size_t>(i)] : ScalarField(grid));
    return SymMatrixField(grid, std::move(upper));
}

void require_dim2(const PeriodicGrid& grid, const char* what) {
    if (grid.dim() != 2) throw ValidationError("dimension", std::string(what) + " is defined for n = 2 only");
}

}  // namespace

std::string CoefficientSpec::variant() const {
    return std::visit(overloaded{
                          [](const spec::Identity&) { return "identity"; },
                          [](const spec::ScalarTimesIdentity&) { return "scalar_times_identity"; },
                          [](const spec::DiagonalSeparable&) { return "diagonal_separable"; },
                          [](const spec::DiagonalMissingOwn&) { return "diagonal_missing_own_variable"; },
                          [](const spec::Layered&) { return "layered"; },
                          [](const spec::Expression&) { return "expression"; },
                          [](const spec::ShiftedEven&) { return "shifted_even"; },
                          [](const spec::Prop31&) { return "prop31_bad"; },
                          [](const spec::Thm16&) { return "thm16_perturbed"; },
                          [](const spec::ASFamily&) { return "a_s_family"; },
                      },
                      params);
}

ScalarField sample_expression(const homog::Expression& e, const PeriodicGrid& grid) {
    std::vector<double> values(grid.size());
    for (std::size_t p = 0; p < grid.size(); ++p) {
        const auto y = grid.coordinate(p);
        const double v = e.evaluate(std::span<const double>(y.data(), static_cast<std::size_t>(grid.dim())));
        if (!std::isfinite(v)) {
            ValidationError err("expression", "expression '" + e.to_string() + "' is not finite on the grid");
            err.with("y1", y[0]).with("y2", y[1]).with("y3", y[2]);
            throw err;
        }
        values[p] = v;
    }
    return ScalarField(grid, std::move(values));
}

ScalarField sample_expression(const std::string& source, const PeriodicGrid& grid) {
    return sample_expression(parse_expression(source, grid.dim()), grid);
}

void validate(const CoefficientSpec& s) {
    const int n = s.dim;
    if (n < 1 || n > 3) throw ValidationError("dimension", "dimension must be 1, 2 or 3");
    const auto names = coordinate_names(n);
    std::visit(overloaded{
                   [](const spec::Identity&) {},
                   [&](const spec::ScalarTimesIdentity& p) { parse_expression(p.a, n); },
                   [&](const spec::DiagonalSeparable& p) {
                       require_count(p.a, n, "diagonal_separable");
                       for (int i = 0; i < n; ++i) {
                           const auto e = parse_expression(p.a[static_cast<std::size_t>(i)], n);
                           for (int k = 0; k < n; ++k) {
                               if (k != i && e.depends_on(names[static_cast<std::size_t>(k)])) {
                                   throw ValidationError("spec", "diagonal_separable: a" + std::to_string(i + 1) +
                                                                     " may depend on y" + std::to_string(i + 1) + " only");
                               }
                           }
                       }
                   },
                   [&](const spec::DiagonalMissingOwn& p) {
                       require_count(p.a, n, "diagonal_missing_own_variable");
                       for (int i = 0; i < n; ++i) {
                           const auto e = parse_expression(p.a[static_cast<std::size_t>(i)], n);
                           if (e.depends_on(names[static_cast<std::size_t>(i)])) {
                               throw ValidationError("spec", "diagonal_missing_own_variable: a" + std::to_string(i + 1) +
                                                                 " must not depend on y" + std::to_string(i + 1));
                           }
                       }
                   },
                   [&](const spec::Layered& p) {
                       require_square(p.entries, n, "layered");
                       for (const auto& src : p.entries) {
                           const auto e = parse_expression(src, n);
                           for (int k = 1; k < n; ++k) {
                               if (e.depends_on(names[static_cast<std::size_t>(k)])) {
                                   throw ValidationError("spec", "layered entries may depend on y1 only: " + src);
                               }
                           }
                       }
                   },
                   [&](const spec::Expression& p) { require_square(p.entries, n, "expression"); },
                   [&](const spec::ShiftedEven& p) {
                       require_square(p.entries, n, "shifted_even");
                       if (p.center.size() != static_cast<std::size_t>(n)) {
                           throw ValidationError("spec", "shifted_even center needs " + std::to_string(n) + " components");
                       }
                   },
                   [&](const spec::Prop31& p) {
                       if (n != 2) throw ValidationError("dimension", "prop31_bad is defined for n = 2 only");
                       parse_expression(p.alpha, n);
                       if (!(p.s > 0.0)) throw ValidationError("spec", "prop31_bad needs s > 0");
                   },
                   [&](const spec::Thm16& p) {
                       if (n != 2) throw ValidationError("dimension", "thm16_perturbed is defined for n = 2 only");
                       if (!p.base) throw ValidationError("spec", "thm16_perturbed needs a base spec");
                       if (p.base->dim != n) throw ValidationError("dimension", "thm16_perturbed base has the wrong dimension");
                       validate(*p.base);
                       Expression::parse(p.xi, {"t"});
                       if (!(p.delta >= 0.0) || !(p.s >= 0.0)) {
                           throw ValidationError("spec", "thm16_perturbed needs delta >= 0 and s >= 0");
                       }
                   },
                   [&](const spec::ASFamily& p) {
                       if (n != 2) throw ValidationError("dimension", "a_s_family is defined for n = 2 only");
                       parse_expression(p.a1, n);
                       parse_expression(p.a2, n);
                       if (!(p.s >= 1.0)) throw ValidationError("spec", "a_s_family needs s >= 1");
                   },
               },
               s.params);
}

SymMatrixField realize(const CoefficientSpec& s, const PeriodicGrid& grid, double tol) {
    if (grid.dim() != s.dim) {
        throw ValidationError("dimension", "spec dimension " + std::to_string(s.dim) + " does not match grid dimension " +
                                               std::to_string(grid.dim()));
    }
    validate(s);
    const int n = s.dim;
    return std::visit(
        overloaded{
            [&](const spec::Identity&) {
                return SymMatrixField::constant(grid, Eigen::MatrixXd::Identity(n, n));
            },
            [&](const spec::ScalarTimesIdentity& p) {
                const ScalarField a = sample_expression(p.a, grid);
                return diagonal(grid, std::vector<ScalarField>(static_cast<std::size_t>(n), a));
            },
            [&](const spec::DiagonalSeparable& p) {
                std::vector<ScalarField> d;
                for (const auto& e : p.a) d.push_back(sample_expression(e, grid));
                return diagonal(grid, d);
            },
            [&](const spec::DiagonalMissingOwn& p) {
                std::vector<ScalarField> d;
                for (const auto& e : p.a) d.push_back(sample_expression(e, grid));
                return diagonal(grid, d);
            },
            [&](const spec::Layered& p) { return from_packed(grid, full_to_packed(p.entries, n)); },
            [&](const spec::Expression& p) { return from_packed(grid, full_to_packed(p.entries, n)); },
            [&](const spec::ShiftedEven& p) {
                std::vector<ScalarField> upper;
                for (const auto& src : full_to_packed(p.entries, n)) {
                    const auto e = parse_expression(src, n);
                    upper.push_back(ScalarField::sample(grid, [&](std::span<const double> y) {
                        std::array<double, 3> plus{}, minus{};
                        for (int i = 0; i < n; ++i) {
                            plus[i] = y[i] - p.center[i];
                            minus[i] = p.center[i] - y[i];
                        }
                        const auto sz = static_cast<std::size_t>(n);
                        return 0.5 * (e.evaluate({plus.data(), sz}) + e.evaluate({minus.data(), sz}));
                    }));
                }
                return SymMatrixField(grid, std::move(upper));
            },
            [&](const spec::Prop31& p) { return prop31_bad(p.alpha, p.s, grid, tol).a; },
            [&](const spec::Thm16& p) {
                const auto base = realize(*p.base, grid, tol);
                return thm16_step2(thm16_step1(base, p.delta, p.xi, false, tol), p.s, tol).a;
            },
            [&](const spec::ASFamily& p) { return a_s_family(p.a1, p.a2, p.s, grid); },
        },
        s.params);
}

// ---------------------------------------------------------------------------

Prop31Construction prop31_bad(const std::string& alpha_src, double s, const PeriodicGrid& grid, double tol) {
    require_dim2(grid, "prop31_bad");
    if (!(s > 0.0)) throw ValidationError("spec", "prop31_bad needs s > 0");
    const ScalarField alpha = sample_expression(alpha_src, grid);
    if (!(alpha.min() > 0.0)) throw ValidationError("spec", "alpha must be positive on the grid");

    const ScalarField log_alpha = alpha.map([](double x) { return std::log(x); });
    const double mixed = second_derivative(log_alpha, 0, 1).max_abs();
    if (mixed <= 1e-3) {
        ValidationError e("degenerate", "alpha is degenerate: (log alpha)_{y1 y2} vanishes on the grid");
        e.with("max_mixed_log_alpha", mixed);
        throw e;
    }

    const SymMatrixField a0 = diagonal(grid, {ScalarField::constant(grid, 1.0), alpha});
    InvariantMeasure r0 = invariant_measure(a0, tol);
    const ScalarField r0_y1 = derivative(r0.r, 0);
    if (r0_y1.max_abs() <= 1e-10 * r0.r.max_abs()) {
        ValidationError e("degenerate", "alpha is degenerate: the invariant measure of diag(1, alpha) is constant in y1");
        e.with("max_r0_y1", r0_y1.max_abs());
        throw e;
    }

    const ScalarField v = r0_y1 * s;
    const ScalarField q = second_derivative(v, 0, 0) + alpha * second_derivative(v, 1, 1);
    const double smallness = q.max_abs();
    const double s_max = s * kSmallness / smallness;
    if (smallness > kSmallness) {
        ValidationError e("smallness", "s too large: |v_11 + alpha v_22| exceeds 1/2 on the grid");
        e.with("s", s).with("max_admissible_s", s_max).with("smallness", smallness);
        throw e;
    }

    const ScalarField a1 = (q + 1.0).map([](double x) { return 1.0 / x; });
    SymMatrixField a = diagonal(grid, {a1, alpha * a1});
    const double predicted = -s * integrate(r0_y1 * r0_y1);
    return {std::move(a), std::move(r0), v, predicted, smallness, s_max};
}

Thm16Step1 thm16_step1(const SymMatrixField& a0, double delta, const std::string& xi_src, bool allow_shrink,
                       double tol) {
    const auto& grid = a0.grid();
    require_dim2(grid, "thm16_step1");
    if (!(delta >= 0.0)) throw ValidationError("spec", "delta must be nonnegative");
    const auto xi = Expression::parse(xi_src, {"t"});

    InvariantMeasure r0 = invariant_measure(a0, tol);
    const double scale = std::max(1.0, a0.sup_norm() * r0.r.max_abs());
    for (int j = 0; j < 2; ++j) {
        if (divergence_field(a0, r0.r, j).max_abs() > 1e-8 * scale) {
            return {a0, std::move(r0), j, 0.0, true, {}};
        }
    }

    const ScalarField xi_field = ScalarField::sample(grid, [&](std::span<const double> y) {
        const double t = y[0] + y[1];
        return xi.evaluate(std::span<const double>(&t, 1));
    });
    const ScalarField bump = xi_field / r0.r;

    std::vector<std::string> warnings;
    double d = delta;
    for (int attempt = 0;; ++attempt) {
        try {
            SymMatrixField a1(grid, {a0.entry(0, 0) + bump * d, a0.entry(0, 1), a0.entry(1, 1) - bump * d});
            // adjoint equation is preserved exactly: xi(y1+y2) has equal second differences along both axes
            const DiscreteOperator op(a1);
            const double res = op.apply_adjoint(r0.r).max_abs() / (op.norm_inf() * r0.r.max_abs());
            if (res > tol) {
                NumericalError e("non_convergence", "r0 is not the invariant measure of the perturbed matrix");
                e.with("residual", res);
                throw e;
            }
            InvariantMeasure r1{r0.r, res, 0};
            int j = 0;
            if (divergence_field(a1, r1.r, 0).max_abs() <= 1e-8 * scale) j = 1;
            return {std::move(a1), std::move(r1), j, d, false, std::move(warnings)};
        } catch (const NumericalError& e) {
            if (e.kind() != "spd_violation" || !allow_shrink || attempt >= 20) throw;
            warnings.push_back("delta " + std::to_string(d) + " breaks positive definiteness; halved");
            d *= 0.5;
        }
    }
}

Thm16Step2 thm16_step2(const Thm16Step1& step1, double s, double tol) {
    const auto& a1 = step1.a1;
    const auto& grid = a1.grid();
    if (!(s >= 0.0)) throw ValidationError("spec", "s must be nonnegative");
    const int j = step1.j;
    const int n = grid.dim();

    const ScalarField b = divergence_field(a1, step1.r1.r, j);
    const ScalarField phi = b * s;
    ScalarField q(grid);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) q = q + a1.entry(i, k) * second_derivative(phi, i, k);

    const double worst = -q.min();
    const double s_max = worst > 0.0 ? s * kSmallness / worst : std::numeric_limits<double>::infinity();
    if (1.0 + q.min() < kSmallness) {
        ValidationError e("smallness", "s too large: 1 + a1_ij phi_ij drops below 1/2");
        e.with("s", s).with("max_admissible_s", s_max);
        throw e;
    }
    const ScalarField gamma = (q + 1.0).map([](double x) { return 1.0 / x; });
    SymMatrixField a = a1.scaled(gamma);

    // r = r1 / gamma, normalized; verify it against the adjoint of A
    ScalarField r = step1.r1.r / gamma;
    r = r * (1.0 / integrate(r));
    const DiscreteOperator op(a);
    const double res = op.apply_adjoint(r).max_abs() / (op.norm_inf() * r.max_abs());
    if (res > tol) {
        NumericalError e("non_convergence", "r1/gamma fails the adjoint equation of the perturbed matrix");
        e.with("residual", res).with("tol", tol);
        throw e;
    }

    const SingularSolver solver1(a1, SolverOptions{tol});
    const auto cells1 = solve_cell_problems(solver1, a1, step1.r1);
    const double c_a1 = obstruction_tensor(a1, step1.r1, cells1)(j, j, j);
    const double abar = cells1.abar(j, j);
    const double predicted = c_a1 - s * abar * integrate(b * b);
    return {std::move(a), gamma, phi, InvariantMeasure{std::move(r), res, 0}, predicted, c_a1, abar, s_max};
}

SymMatrixField a_s_family(const std::string& a1_src, const std::string& a2_src, double s, const PeriodicGrid& grid) {
    require_dim2(grid, "a_s_family");
    if (!(s >= 1.0)) throw ValidationError("spec", "a_s_family needs s >= 1");
    const ScalarField a1 = sample_expression(a1_src, grid);
    const ScalarField a2 = sample_expression(a2_src, grid);
    if (!(a1.min() > 0.0) || !(a2.min() > 0.0)) throw ValidationError("bounds", "a1 and a2 must be positive");
    return diagonal(grid, {a1, a2 * s});
}

ScalarField limit_measure(const std::string& a1_src, const std::string& a2_src, const PeriodicGrid& grid) {
    require_dim2(grid, "limit_measure");
    const ScalarField a1 = sample_expression(a1_src, grid);
    const ScalarField a2 = sample_expression(a2_src, grid);
    if (!(a1.min() > 0.0) || !(a2.min() > 0.0)) throw ValidationError("bounds", "a1 and a2 must be positive");
    const ScalarField ratio = a1 / a2;
    const int N = grid.resolution();
    std::vector<double> mean(static_cast<std::size_t>(N), 0.0);
    for (std::size_t p = 0; p < grid.size(); ++p) mean[static_cast<std::size_t>(grid.multi_index(p)[0])] += ratio[p] / N;
    std::vector<double> r(grid.size());
    for (std::size_t p = 0; p < grid.size(); ++p) r[p] = 1.0 / (a2[p] * mean[static_cast<std::size_t>(grid.multi_index(p)[0])]);
    ScalarField out(grid, std::move(r));
    return out * (1.0 / integrate(out));
}

double spd_margin(const SymMatrixField& a) { return a.lambda_min(); }

CoefficientSpec default_spec(const std::string& name, int n) {
    auto sin_of = [](int i) { return "1+0.5*sin(2*pi*y" + std::to_string(i + 1) + ")"; };
    auto full = [&](auto&& entry) {
        std::vector<std::string> out;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) out.push_back(entry(std::min(i, j), std::max(i, j)));
        return out;
    };
    CoefficientSpec s;
    s.dim = n;
    if (name == "identity") {
        s.params = spec::Identity{};
    } else if (name == "scalar_times_identity") {
        s.params = spec::ScalarTimesIdentity{"1+0.5*sin(2*pi*y1)"};
    } else if (name == "diagonal_separable") {
        spec::DiagonalSeparable p;
        for (int i = 0; i < n; ++i) p.a.push_back(sin_of(i));
        s.params = p;
    } else if (name == "diagonal_missing_own_variable") {
        spec::DiagonalMissingOwn p;
        for (int i = 0; i < n; ++i) p.a.push_back(n == 1 ? "2" : sin_of((i + 1) % n));
        s.params = p;
    } else if (name == "layered") {
        // a_1j / a_11 constant keeps every divergence field at zero
        s.params = spec::Layered{full([](int i, int j) -> std::string {
            if (i == 0 && j > 0) return "0.3*(2+sin(2*pi*y1))";
            if (i != j) return "0.1*cos(2*pi*y1)";
            return i == 0 ? "2+sin(2*pi*y1)" : "1+0.5*sin(2*pi*y1)";
        })};
    } else if (name == "expression") {
        s.params = spec::Expression{full([&](int i, int j) -> std::string {
            if (i != j) return "0.2*sin(2*pi*(y1+y" + std::to_string(n) + "))";
            return "1.5+0.5*sin(2*pi*y" + std::to_string((i + 1) % n + 1) + ")";
        })};
    } else if (name == "shifted_even") {
        spec::ShiftedEven p;
        p.entries = full([&](int i, int j) -> std::string {
            if (i != j) return "0.2*sin(2*pi*(y1+2*y" + std::to_string(n) + "))";
            return "1.5+0.4*sin(2*pi*y" + std::to_string((i + 1) % n + 1) + ")+0.3*cos(2*pi*y1)";
        });
        for (int i = 0; i < n; ++i) p.center.push_back(i == 0 ? 0.25 : 0.125);
        s.params = p;
    } else if (name == "prop31_bad" || name == "prop31") {
        s.params = spec::Prop31{};
    } else if (name == "thm16_perturbed" || name == "thm16") {
        auto base = std::make_shared<CoefficientSpec>();
        base->dim = n;
        base->params = spec::Identity{};
        spec::Thm16 p;
        p.base = base;
        s.params = p;
    } else if (name == "a_s_family" || name == "a_s") {
        s.params = spec::ASFamily{};
    } else {
        throw ValidationError("spec", "unknown spec variant '" + name + "'");
    }
    return s;
}

}  // namespace homog

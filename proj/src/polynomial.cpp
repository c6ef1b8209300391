#include "homog/polynomial.hpp"

#include <cmath>
#include <cstdio>

#include "homog/error.hpp"

namespace homog {

Polynomial Polynomial::constant(int dim, double c) { return monomial(dim, c, {0, 0, 0}); }

Polynomial Polynomial::coordinate(int dim, int axis) {
    if (axis < 0 || axis >= dim) throw ValidationError("axis", "polynomial coordinate axis out of range");
    Exponents e{0, 0, 0};
    e[static_cast<std::size_t>(axis)] = 1;
    return monomial(dim, 1.0, e);
}

Polynomial Polynomial::monomial(int dim, double c, Exponents e) {
    if (dim < 1 || dim > 3) throw ValidationError("dimension", "polynomial dimension must be 1, 2 or 3");
    for (int i = dim; i < 3; ++i)
        if (e[static_cast<std::size_t>(i)] != 0) throw ValidationError("dimension", "exponent on a missing axis");
    Polynomial p(dim);
    p.add_term(e, c);
    return p;
}

void Polynomial::add_term(const Exponents& e, double c) {
    if (c == 0.0) return;
    const double sum = (terms_[e] += c);
    if (sum == 0.0) terms_.erase(e);
}

double Polynomial::evaluate(std::span<const double> x) const {
    double out = 0.0;
    for (const auto& [e, c] : terms_) {
        double t = c;
        for (int i = 0; i < dim_; ++i)
            for (int k = 0; k < e[static_cast<std::size_t>(i)]; ++k) t *= x[static_cast<std::size_t>(i)];
        out += t;
    }
    return out;
}

Polynomial Polynomial::derivative(int axis) const {
    if (axis < 0 || axis >= dim_) throw ValidationError("axis", "polynomial derivative axis out of range");
    Polynomial d(dim_);
    const auto a = static_cast<std::size_t>(axis);
    for (const auto& [e, c] : terms_) {
        if (e[a] == 0) continue;
        Exponents f = e;
        --f[a];
        d.add_term(f, c * e[a]);
    }
    return d;
}

int Polynomial::degree() const noexcept {
    int d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, e[0] + e[1] + e[2]);
    return d;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    Polynomial p = *this;
    p.dim_ = std::max(dim_, o.dim_);
    for (const auto& [e, c] : o.terms_) p.add_term(e, c);
    return p;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o * -1.0; }

Polynomial Polynomial::operator*(const Polynomial& o) const {
    Polynomial p(std::max(dim_, o.dim_));
    for (const auto& [e1, c1] : terms_)
        for (const auto& [e2, c2] : o.terms_) p.add_term({e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]}, c1 * c2);
    return p;
}

Polynomial Polynomial::operator*(double s) const {
    Polynomial p(dim_);
    for (const auto& [e, c] : terms_) p.add_term(e, c * s);
    return p;
}

std::string Polynomial::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [e, c] = *it;
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", std::abs(c));
        out += out.empty() ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + ");
        std::string mono;
        for (int i = 0; i < dim_; ++i) {
            const int k = e[static_cast<std::size_t>(i)];
            if (k == 0) continue;
            if (!mono.empty()) mono += '*';
            mono += "x" + std::to_string(i + 1);
            if (k > 1) mono += "^" + std::to_string(k);
        }
        if (mono.empty()) out += buf;
        else if (std::abs(c) == 1.0) out += mono;
        else out += std::string(buf) + "*" + mono;
    }
    return out;
}

}  // namespace homog

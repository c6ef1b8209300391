#include "homog/expression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

namespace homog {

struct Expression::Node {
    enum class Kind { number, variable, negate, add, sub, mul, div, pow, call };
    enum class Func { sin, cos, tan, exp, log, sqrt, abs };

    Kind kind;
    double value = 0.0;     // number
    std::size_t slot = 0;   // variable
    Func func = Func::sin;  // call
    std::string text;       // number/variable spelling
    std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

struct FuncName {
    const char* name;
    Node::Func func;
};

constexpr FuncName kFunctions[] = {
    {"sin", Node::Func::sin}, {"cos", Node::Func::cos},   {"tan", Node::Func::tan}, {"exp", Node::Func::exp},
    {"log", Node::Func::log}, {"sqrt", Node::Func::sqrt}, {"abs", Node::Func::abs},
};

const char* func_name(Node::Func f) {
    for (const auto& e : kFunctions)
        if (e.func == f) return e.name;
    return "?";
}

NodePtr make(Node::Kind kind, NodePtr lhs, NodePtr rhs = nullptr) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

class Parser {
public:
    Parser(std::string_view src, const std::vector<std::string>& vars) : src_(src), vars_(vars) {}

    NodePtr parse() {
        auto root = sum();
        skip();
        if (pos_ != src_.size()) fail("unexpected character '" + std::string(1, src_[pos_]) + "'");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

    void skip() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr sum() {
        auto lhs = product();
        for (;;) {
            if (accept('+')) lhs = make(Node::Kind::add, lhs, product());
            else if (accept('-')) lhs = make(Node::Kind::sub, lhs, product());
            else return lhs;
        }
    }

    NodePtr product() {
        auto lhs = unary();
        for (;;) {
            if (accept('*')) lhs = make(Node::Kind::mul, lhs, unary());
            else if (accept('/')) lhs = make(Node::Kind::div, lhs, unary());
            else return lhs;
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(Node::Kind::negate, unary());
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        auto lhs = primary();
        while (accept('^')) lhs = make(Node::Kind::pow, lhs, exponent());
        return lhs;
    }

    NodePtr exponent() {
        if (accept('-')) return make(Node::Kind::negate, exponent());
        return primary();
    }

    NodePtr primary() {
        skip();
        if (pos_ >= src_.size()) fail("unexpected end of expression");
        const char c = src_[pos_];
        if (accept('(')) {
            auto inner = sum();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail("unexpected character '" + std::string(1, c) + "'");
    }

    NodePtr number() {
        const std::size_t start = pos_;
        std::string buf(src_.substr(pos_));
        char* end = nullptr;
        const double v = std::strtod(buf.c_str(), &end);
        const auto len = static_cast<std::size_t>(end - buf.c_str());
        if (len == 0) fail("malformed number");
        pos_ += len;
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::number;
        n->value = v;
        n->text = std::string(src_.substr(start, len));
        return n;
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string name(src_.substr(start, pos_ - start));

        if (name == "pi") {
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::number;
            n->value = std::numbers::pi;
            n->text = "pi";
            return n;
        }
        for (const auto& f : kFunctions) {
            if (name == f.name) {
                if (!accept('(')) fail("expected '(' after function " + name);
                auto arg = sum();
                if (!accept(')')) fail("expected ')'");
                auto n = std::make_shared<Node>();
                n->kind = Node::Kind::call;
                n->func = f.func;
                n->lhs = std::move(arg);
                return n;
            }
        }
        const auto it = std::find(vars_.begin(), vars_.end(), name);
        if (it == vars_.end()) {
            pos_ = start;
            fail("unknown identifier '" + name + "'");
        }
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::variable;
        n->slot = static_cast<std::size_t>(it - vars_.begin());
        n->text = name;
        return n;
    }

    std::string_view src_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;
};

double eval(const Node& n, std::span<const double> x) {
    switch (n.kind) {
        case Node::Kind::number: return n.value;
        case Node::Kind::variable: return x[n.slot];
        case Node::Kind::negate: return -eval(*n.lhs, x);
        case Node::Kind::add: return eval(*n.lhs, x) + eval(*n.rhs, x);
        case Node::Kind::sub: return eval(*n.lhs, x) - eval(*n.rhs, x);
        case Node::Kind::mul: return eval(*n.lhs, x) * eval(*n.rhs, x);
        case Node::Kind::div: return eval(*n.lhs, x) / eval(*n.rhs, x);
        case Node::Kind::pow: return std::pow(eval(*n.lhs, x), eval(*n.rhs, x));
        case Node::Kind::call: {
            const double a = eval(*n.lhs, x);
            switch (n.func) {
                case Node::Func::sin: return std::sin(a);
                case Node::Func::cos: return std::cos(a);
                case Node::Func::tan: return std::tan(a);
                case Node::Func::exp: return std::exp(a);
                case Node::Func::log: return std::log(a);
                case Node::Func::sqrt: return std::sqrt(a);
                case Node::Func::abs: return std::abs(a);
            }
        }
    }
    return 0.0;
}

// Binding strength used for parenthesization when printing.
int precedence(const Node& n) {
    switch (n.kind) {
        case Node::Kind::add:
        case Node::Kind::sub: return 1;
        case Node::Kind::mul:
        case Node::Kind::div: return 2;
        case Node::Kind::negate: return 3;
        case Node::Kind::pow: return 4;
        default: return 5;
    }
}

void print(const Node& n, std::string& out);

void print_operand(const Node& n, int min_prec, std::string& out) {
    const bool paren = precedence(n) < min_prec;
    if (paren) out += '(';
    print(n, out);
    if (paren) out += ')';
}

void print(const Node& n, std::string& out) {
    switch (n.kind) {
        case Node::Kind::number:
            if (!n.text.empty()) {
                out += n.text;
            } else {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.17g", n.value);
                out += buf;
            }
            return;
        case Node::Kind::variable: out += n.text; return;
        case Node::Kind::negate:
            out += '-';
            print_operand(*n.lhs, 3, out);
            return;
        case Node::Kind::call:
            out += func_name(n.func);
            out += '(';
            print(*n.lhs, out);
            out += ')';
            return;
        case Node::Kind::pow:
            print_operand(*n.lhs, 4, out);
            out += '^';
            print_operand(*n.rhs, 5, out);
            return;
        default: {
            const int p = precedence(n);
            const char op = n.kind == Node::Kind::add ? '+' : n.kind == Node::Kind::sub ? '-'
                            : n.kind == Node::Kind::mul ? '*' : '/';
            print_operand(*n.lhs, p, out);
            out += op;
            // right operand of a left-associative operator needs strictly tighter binding
            print_operand(*n.rhs, p + 1, out);
            return;
        }
    }
}

bool uses_slot(const Node& n, std::size_t slot) {
    if (n.kind == Node::Kind::variable) return n.slot == slot;
    return (n.lhs && uses_slot(*n.lhs, slot)) || (n.rhs && uses_slot(*n.rhs, slot));
}

}  // namespace

Expression Expression::parse(std::string_view source, std::vector<std::string> variables) {
    Parser p(source, variables);
    auto root = p.parse();
    return Expression(std::move(root), std::move(variables));
}

Expression Expression::constant(double value) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::number;
    n->value = value;
    return Expression(std::move(n), {});
}

double Expression::evaluate(std::span<const double> values) const {
    if (values.size() < variables_.size()) {
        throw ValidationError("expression", "expression needs " + std::to_string(variables_.size()) + " values");
    }
    return eval(*root_, values);
}

std::string Expression::to_string() const {
    std::string out;
    print(*root_, out);
    return out;
}

bool Expression::depends_on(std::string_view variable) const {
    const auto it = std::find(variables_.begin(), variables_.end(), variable);
    if (it == variables_.end()) return false;
    return uses_slot(*root_, static_cast<std::size_t>(it - variables_.begin()));
}

std::vector<std::string> coordinate_names(int dim, std::string_view prefix) {
    std::vector<std::string> names;
    for (int i = 1; i <= dim; ++i) names.push_back(std::string(prefix) + std::to_string(i));
    return names;
}

Expression parse_expression(std::string_view source, int dim) {
    return Expression::parse(source, coordinate_names(dim));
}

}  // namespace homog

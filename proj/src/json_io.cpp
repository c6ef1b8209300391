#include "homog/json_io.hpp"

#include <cmath>
#include <cstdio>

namespace homog {

namespace {

std::string expr_field(const Json& j, const char* key, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
        return buf;
    }
    throw ValidationError("spec", std::string("'") + key + "' must be an expression string or a number");
}

std::string expr_value(const Json& v, const char* what) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
        return buf;
    }
    throw ValidationError("spec", std::string(what) + " entries must be expression strings or numbers");
}

double number_field(const Json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw ValidationError("spec", std::string("'") + key + "' must be a number");
    return j.at(key).get<double>();
}

std::vector<std::string> expr_list(const Json& j, const char* key, const std::vector<std::string>& fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_array()) throw ValidationError("spec", std::string("'") + key + "' must be an array");
    std::vector<std::string> out;
    for (const auto& e : v) out.push_back(expr_value(e, key));
    return out;
}

std::vector<std::string> matrix_field(const Json& j, const char* key, int n, const std::vector<std::string>& fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_array() || v.size() != static_cast<std::size_t>(n)) {
        throw ValidationError("spec", std::string("'") + key + "' must be an " + std::to_string(n) + " x " +
                                          std::to_string(n) + " array");
    }
    std::vector<std::string> out;
    for (const auto& row : v) {
        if (!row.is_array() || row.size() != static_cast<std::size_t>(n)) {
            throw ValidationError("spec", std::string("'") + key + "' rows must have " + std::to_string(n) + " entries");
        }
        for (const auto& e : row) out.push_back(expr_value(e, key));
    }
    return out;
}

Json matrix_out(const std::vector<std::string>& entries, int n) {
    Json rows = Json::array();
    for (int i = 0; i < n; ++i) {
        Json row = Json::array();
        for (int k = 0; k < n; ++k) row.push_back(entries[static_cast<std::size_t>(i * n + k)]);
        rows.push_back(row);
    }
    return rows;
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void write(const Json& j, int indent, int depth, std::string& out) {
    auto newline = [&](int d) {
        if (indent < 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += indent < 0 ? ", " : ",";
                first = false;
                newline(depth + 1);
                out += Json(it.key()).dump();
                out += ": ";
                write(it.value(), indent, depth + 1, out);
            }
            newline(depth);
            out += '}';
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // numeric rows stay on one line
            bool flat = indent < 0;
            if (!flat) {
                flat = true;
                for (const auto& e : j) flat = flat && (e.is_number() || e.is_string() || e.is_boolean() || e.is_null());
            }
            out += '[';
            bool first = true;
            for (const auto& e : j) {
                if (!first) out += flat ? ", " : ",";
                first = false;
                if (!flat) newline(depth + 1);
                write(e, flat ? -1 : indent, depth + 1, out);
            }
            if (!flat) newline(depth);
            out += ']';
            return;
        }
        case Json::value_t::number_float: {
            const double v = j.get<double>();
            if (!std::isfinite(v)) {
                out += "null";
                return;
            }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out += buf;
            return;
        }
        default: out += j.dump(); return;
    }
}

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json fit_json(const std::optional<LogLogFit>& f) {
    if (!f) return nullptr;
    return Json{{"slope", f->slope}, {"intercept", f->intercept}, {"residual", f->residual}};
}

}  // namespace

Json spec_to_json(const CoefficientSpec& s) {
    const int n = s.dim;
    Json params = Json::object();
    std::visit(overloaded{
                   [](const spec::Identity&) {},
                   [&](const spec::ScalarTimesIdentity& p) { params["a"] = p.a; },
                   [&](const spec::DiagonalSeparable& p) { params["a"] = p.a; },
                   [&](const spec::DiagonalMissingOwn& p) { params["a"] = p.a; },
                   [&](const spec::Layered& p) { params["entries"] = matrix_out(p.entries, n); },
                   [&](const spec::Expression& p) { params["entries"] = matrix_out(p.entries, n); },
                   [&](const spec::ShiftedEven& p) {
                       params["entries"] = matrix_out(p.entries, n);
                       params["center"] = p.center;
                   },
                   [&](const spec::Prop31& p) {
                       params["alpha"] = p.alpha;
                       params["s"] = p.s;
                   },
                   [&](const spec::Thm16& p) {
                       params["base"] = spec_to_json(*p.base);
                       params["delta"] = p.delta;
                       params["s"] = p.s;
                       params["xi"] = p.xi;
                   },
                   [&](const spec::ASFamily& p) {
                       params["a1"] = p.a1;
                       params["a2"] = p.a2;
                       params["s"] = p.s;
                   },
               },
               s.params);
    return Json{{"variant", s.variant()}, {"dim", n}, {"params", params}};
}

CoefficientSpec spec_from_json(const Json& j) {
    if (!j.is_object()) throw ValidationError("spec", "spec must be a JSON object");
    if (!j.contains("variant") || !j.at("variant").is_string()) {
        throw ValidationError("spec", "spec needs a string 'variant'");
    }
    int n = 2;
    if (j.contains("dim")) {
        if (!j.at("dim").is_number_integer()) throw ValidationError("spec", "'dim' must be an integer");
        n = j.at("dim").get<int>();
    }
    const Json params = j.contains("params") ? j.at("params") : Json::object();
    if (!params.is_object()) throw ValidationError("spec", "'params' must be an object");

    CoefficientSpec s = default_spec(j.at("variant").get<std::string>(), n);
    std::visit(overloaded{
                   [](spec::Identity&) {},
                   [&](spec::ScalarTimesIdentity& p) { p.a = expr_field(params, "a", p.a); },
                   [&](spec::DiagonalSeparable& p) { p.a = expr_list(params, "a", p.a); },
                   [&](spec::DiagonalMissingOwn& p) { p.a = expr_list(params, "a", p.a); },
                   [&](spec::Layered& p) { p.entries = matrix_field(params, "entries", n, p.entries); },
                   [&](spec::Expression& p) { p.entries = matrix_field(params, "entries", n, p.entries); },
                   [&](spec::ShiftedEven& p) {
                       p.entries = matrix_field(params, "entries", n, p.entries);
                       if (params.contains("center")) {
                           if (!params.at("center").is_array()) throw ValidationError("spec", "'center' must be an array");
                           p.center.clear();
                           for (const auto& v : params.at("center")) {
                               if (!v.is_number()) throw ValidationError("spec", "'center' entries must be numbers");
                               p.center.push_back(v.get<double>());
                           }
                       }
                   },
                   [&](spec::Prop31& p) {
                       p.alpha = expr_field(params, "alpha", p.alpha);
                       p.s = number_field(params, "s", p.s);
                   },
                   [&](spec::Thm16& p) {
                       if (params.contains("base")) {
                           p.base = std::make_shared<CoefficientSpec>(spec_from_json(params.at("base")));
                       }
                       p.delta = number_field(params, "delta", p.delta);
                       p.s = number_field(params, "s", p.s);
                       p.xi = expr_field(params, "xi", p.xi);
                   },
                   [&](spec::ASFamily& p) {
                       p.a1 = expr_field(params, "a1", p.a1);
                       p.a2 = expr_field(params, "a2", p.a2);
                       p.s = number_field(params, "s", p.s);
                   },
               },
               s.params);
    validate(s);
    return s;
}

Json to_json(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(row);
    }
    return rows;
}

Json to_json(const ObstructionTensor& c) {
    // entries[k][l][j] = c^{kl}_j
    Json out = Json::array();
    for (int k = 0; k < c.dim; ++k) {
        Json a = Json::array();
        for (int l = 0; l < c.dim; ++l) {
            Json b = Json::array();
            for (int j = 0; j < c.dim; ++j) b.push_back(c(k, l, j));
            a.push_back(b);
        }
        out.push_back(a);
    }
    return Json{{"entries", out}, {"dual_gap", c.dual_gap}, {"max_abs_c", c.max_abs()}};
}

Json to_json(const Verdict& v) {
    return Json{{"verdict", to_string(v.classification)},
                {"max_abs_c", v.max_abs_c},
                {"threshold", v.threshold},
                {"margin", v.margin}};
}

Json to_json(const HomogenizationResult& r) {
    const auto& g = r.cells.grid;
    Json corr = Json::array();
    for (const auto& v : r.cells.v) corr.push_back(v.max_abs());
    return Json{
        {"grid", {{"dim", g.dim()}, {"N", g.resolution()}, {"h", g.spacing()}}},
        {"abar", to_json(r.cells.abar)},
        {"c", to_json(r.c)},
        {"classification", to_json(r.verdict)},
        {"measure", {{"min", r.measure.r.min()}, {"max", r.measure.r.max()}, {"residual", r.measure.residual}}},
        {"cell_residual", r.cells.residual},
        {"corrector_max_abs", corr},
    };
}

Json to_json(const RateStudy& s) {
    Json pts = Json::array();
    for (const auto& p : s.points) {
        pts.push_back(Json{{"eps", p.eps},
                           {"inv_eps", p.inv_eps},
                           {"box_cells", p.box_cells},
                           {"e0", p.e0},
                           {"e1", p.e1},
                           {"local_slope_e0", opt(p.local_slope_e0)},
                           {"local_slope_e1", opt(p.local_slope_e1)},
                           {"residual", p.residual}});
    }
    return Json{{"spec_variant", s.spec_variant},
                {"abar", to_json(s.abar)},
                {"c", to_json(s.c)},
                {"classification", to_json(s.verdict)},
                {"h", s.h_const},
                {"z_max_abs", s.z_max},
                {"points", pts},
                {"fit_e0", fit_json(s.fit_e0)},
                {"fit_e1", fit_json(s.fit_e1)},
                {"e0_exact", s.e0_exact},
                {"e1_exact", s.e1_exact},
                {"expectation", s.expectation},
                {"pass", s.pass}};
}

Json to_json(const AsymptoticStudy& s) {
    Json pts = Json::array();
    for (const auto& p : s.points) pts.push_back(Json{{"s", p.s}, {"distance", p.distance}, {"residual", p.residual}});
    return Json{{"points", pts}, {"strictly_decreasing", s.strictly_decreasing}, {"ratio", s.ratio}};
}

Json summary_json(const DirichletSolution& s) {
    return Json{{"dim", s.grid.dim()}, {"cells", s.grid.cells()}, {"max_abs", s.max_abs()}, {"residual", s.residual}};
}

Json error_json(const Error& e) {
    Json details = Json::object();
    for (const auto& [k, v] : e.details()) details[k] = v;
    return Json{{"error", e.kind()}, {"message", e.what()}, {"details", details}};
}

std::string dump(const Json& j, int indent) {
    std::string out;
    write(j, indent, 0, out);
    return out;
}

}  // namespace homog

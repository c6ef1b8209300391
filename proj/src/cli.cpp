#include "homog/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <CLI11.hpp>

#include "homog/dirichlet.hpp"
#include "homog/gallery.hpp"
#include "homog/homogenize.hpp"
#include "homog/json_io.hpp"
#include "homog/rate_lab.hpp"

namespace homog::cli {

namespace {

constexpr const char* kCsvHelp = R"(CSV columns (',' separated, '.' decimal, header row):
  classify     variant,verdict,max_abs_c,threshold,margin,dual_gap
  effective    y1..yn,r
  cell         y1..yn,r,v11,v12,..,vnn   (upper triangle)
  rates        eps,inv_eps,box_cells,e0,e1,local_slope_e0,local_slope_e1
  asymptotics  s,distance,residual
  gallery      y1..yn,a11,a12,..,ann     (upper triangle))";

struct Flags {
    std::string config, spec, data, format, output, alpha, xi, a1, a2, entries;
    std::vector<std::string> a;
    std::vector<double> center, s_list;
    std::vector<int> eps;
    int n = 2, N = 64, cells_per_period = 16;
    double tol = kDefaultTol, threshold = 1e-6, s = 0.0, delta = 0.0;
};

// option name -> JSON value of the flag, for the options the user actually gave
struct Registered {
    CLI::Option* option;
    std::function<Json()> value;
};

Json defaults(const std::string& command) {
    const spec::ASFamily as{};
    return Json{{"command", command},
                {"spec", "identity"},
                {"n", 2},
                {"N", 64},
                {"tol", kDefaultTol},
                {"threshold", 1e-6},
                {"eps", {4, 8, 16, 32}},
                {"cells_per_period", 16},
                {"data", "cubic:1,1,1"},
                {"s_list", {10.0, 100.0, 1000.0}},
                {"a1", as.a1},
                {"a2", as.a2},
                {"format", "json"},
                {"output", ""}};
}

Json read_json_file(const std::string& path) {
    if (!std::filesystem::exists(path)) throw ValidationError("file", "file not found: " + path);
    std::ifstream in(path);
    if (!in) throw ValidationError("file", "cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw ValidationError("json", path + ": " + e.what());
    }
}

// A spec source is inline JSON, a JSON file, or a variant name.
Json spec_source(const Json& v, int n) {
    if (v.is_object()) return v;
    if (!v.is_string()) throw ValidationError("spec", "spec must be a name, a JSON object or a file path");
    const std::string s = v.get<std::string>();
    if (!s.empty() && s.front() == '{') {
        try {
            return Json::parse(s);
        } catch (const Json::exception& e) {
            throw ValidationError("json", std::string("inline spec: ") + e.what());
        }
    }
    if (s.find('/') != std::string::npos || s.ends_with(".json")) return read_json_file(s);
    return spec_to_json(default_spec(s, n));
}

template <class T>
T get(const Json& cfg, const char* key) {
    try {
        return cfg.at(key).get<T>();
    } catch (const Json::exception&) {
        throw ValidationError("config", std::string("config key '") + key + "' is missing or has the wrong type");
    }
}

std::array<int, 3> parse_data(const std::string& data, int n) {
    const std::string prefix = "cubic:";
    if (!data.starts_with(prefix)) throw ValidationError("data", "data must look like cubic:j,k,l");
    std::array<int, 3> out{};
    std::stringstream ss(data.substr(prefix.size()));
    std::string tok;
    int count = 0;
    while (std::getline(ss, tok, ',')) {
        if (count == 3) throw ValidationError("data", "cubic data takes exactly three indices");
        int v = 0;
        try {
            std::size_t used = 0;
            v = std::stoi(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ValidationError("data", "bad cubic index '" + tok + "'");
        }
        if (v < 1 || v > n) throw ValidationError("data", "cubic indices must lie in 1.." + std::to_string(n));
        out[static_cast<std::size_t>(count++)] = v - 1;
    }
    if (count != 3) throw ValidationError("data", "cubic data takes exactly three indices");
    return out;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void node_table(std::ostream& os, const PeriodicGrid& grid, const std::vector<std::string>& names,
                const std::vector<const ScalarField*>& cols) {
    for (int i = 0; i < grid.dim(); ++i) os << 'y' << (i + 1) << ',';
    for (std::size_t k = 0; k < names.size(); ++k) os << names[k] << (k + 1 < names.size() ? "," : "\n");
    for (std::size_t p = 0; p < grid.size(); ++p) {
        const auto y = grid.coordinate(p);
        for (int i = 0; i < grid.dim(); ++i) os << num(y[static_cast<std::size_t>(i)]) << ',';
        for (std::size_t k = 0; k < cols.size(); ++k) os << num((*cols[k])[p]) << (k + 1 < cols.size() ? "," : "\n");
    }
}

std::vector<std::string> packed_names(const std::string& prefix, int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) out.push_back(prefix + std::to_string(i + 1) + std::to_string(j + 1));
    return out;
}

// Side data of the constructions whose c has a predicted value.
Json construction_json(const CoefficientSpec& s, const PeriodicGrid& grid, double tol, std::optional<int>* axis) {
    if (const auto* p = std::get_if<spec::Prop31>(&s.params)) {
        const auto con = prop31_bad(p->alpha, p->s, grid, tol);
        if (axis) *axis = 0;
        return Json{{"predicted_c", con.predicted_c111},
                    {"index", {1, 1, 1}},
                    {"smallness", con.smallness},
                    {"max_admissible_s", con.max_admissible_s}};
    }
    if (const auto* p = std::get_if<spec::Thm16>(&s.params)) {
        const auto base = realize(*p->base, grid, tol);
        const auto step1 = thm16_step1(base, p->delta, p->xi, false, tol);
        const auto step2 = thm16_step2(step1, p->s, tol);
        if (axis) *axis = step1.j;
        const int j = step1.j + 1;
        return Json{{"predicted_c", step2.predicted_c},
                    {"index", {j, j, j}},
                    {"c_step1", step2.c_a1},
                    {"abar_step1_jj", step2.abar1_jj},
                    {"step1_unchanged", step1.unchanged},
                    {"delta_used", step1.delta},
                    {"warnings", step1.warnings},
                    {"max_admissible_s", step2.max_admissible_s}};
    }
    return nullptr;
}

struct Outputs {
    Json result;
    std::string csv;
};

Outputs run_homogenize(const std::string& command, const Json& cfg, const CoefficientSpec& s) {
    const PeriodicGrid grid(s.dim, get<int>(cfg, "N"));
    const double tol = get<double>(cfg, "tol");
    const SymMatrixField a = realize(s, grid, tol);
    const auto hom = homogenize(a, HomogenizeOptions{tol, get<double>(cfg, "threshold")});
    Outputs out;
    out.result = to_json(hom);
    out.result["spd_margin"] = spd_margin(a);

    std::optional<int> axis;
    const Json side = construction_json(s, grid, tol, &axis);
    if (!side.is_null()) {
        Json cmp = side;
        cmp["computed_c"] = hom.c(*axis, *axis, *axis);
        out.result["construction"] = cmp;
    }

    std::ostringstream csv;
    if (command == "classify") {
        csv << "variant,verdict,max_abs_c,threshold,margin,dual_gap\n"
            << s.variant() << ',' << to_string(hom.verdict.classification) << ',' << num(hom.verdict.max_abs_c) << ','
            << num(hom.verdict.threshold) << ',' << num(hom.verdict.margin) << ',' << num(hom.c.dual_gap) << '\n';
    } else if (command == "effective") {
        node_table(csv, grid, {"r"}, {&hom.measure.r});
    } else {
        std::vector<const ScalarField*> cols{&hom.measure.r};
        std::vector<std::string> names{"r"};
        for (const auto& v : hom.cells.v) cols.push_back(&v);
        for (const auto& nm : packed_names("v", s.dim)) names.push_back(nm);
        node_table(csv, grid, names, cols);
    }
    out.csv = csv.str();
    return out;
}

Outputs run_gallery(const Json& cfg, const CoefficientSpec& s) {
    const PeriodicGrid grid(s.dim, get<int>(cfg, "N"));
    const double tol = get<double>(cfg, "tol");
    const SymMatrixField a = realize(s, grid, tol);
    Outputs out;
    Json entries = Json::object();
    for (int i = 0; i < s.dim; ++i)
        for (int j = i; j < s.dim; ++j) {
            const auto& e = a.entry(i, j);
            entries["a" + std::to_string(i + 1) + std::to_string(j + 1)] = Json{{"min", e.min()}, {"max", e.max()}};
        }
    out.result = Json{{"lambda_min", a.lambda_min()}, {"lambda_max", a.lambda_max()}, {"entries", entries}};
    const Json side = construction_json(s, grid, tol, nullptr);
    if (!side.is_null()) out.result["construction"] = side;
    if (const auto* p = std::get_if<spec::ASFamily>(&s.params)) {
        const auto limit = limit_measure(p->a1, p->a2, grid);
        const auto r = invariant_measure(a, tol);
        out.result["limit_measure_distance"] = l2_norm(r.r - limit);
    }

    std::ostringstream csv;
    std::vector<const ScalarField*> cols;
    for (int i = 0; i < s.dim; ++i)
        for (int j = i; j < s.dim; ++j) cols.push_back(&a.entry(i, j));
    node_table(csv, grid, packed_names("a", s.dim), cols);
    out.csv = csv.str();
    return out;
}

Outputs run_rates(const Json& cfg, const CoefficientSpec& s) {
    RateStudyConfig rc;
    rc.inv_eps = get<std::vector<int>>(cfg, "eps");
    rc.cells_per_period = get<int>(cfg, "cells_per_period");
    rc.jkl = parse_data(get<std::string>(cfg, "data"), s.dim);
    rc.tol = get<double>(cfg, "tol");
    rc.homogenize.threshold = get<double>(cfg, "threshold");
    const auto study = run_rate_study(s, rc);
    std::ostringstream csv;
    write_csv(csv, study);
    return {to_json(study), csv.str()};
}

Outputs run_asymptotics(const Json& cfg) {
    const auto study = run_asymptotic_study(get<std::string>(cfg, "a1"), get<std::string>(cfg, "a2"),
                                            get<std::vector<double>>(cfg, "s_list"), get<int>(cfg, "N"),
                                            get<double>(cfg, "tol"));
    std::ostringstream csv;
    write_csv(csv, study);
    return {to_json(study), csv.str()};
}

void check_config(const std::string& command, const Json& cfg) {
    const int N = get<int>(cfg, "N");
    if (N < 4 || N % 2 != 0) throw ValidationError("config", "N must be even and at least 4");
    if (!(get<double>(cfg, "tol") > 0.0)) throw ValidationError("config", "tol must be positive");
    if (!(get<double>(cfg, "threshold") > 0.0)) throw ValidationError("config", "threshold must be positive");
    const auto fmt = get<std::string>(cfg, "format");
    if (fmt != "json" && fmt != "csv") throw ValidationError("config", "format must be json or csv");
    if (command == "rates") {
        validate_eps_ladder(get<std::vector<int>>(cfg, "eps"));
        const int cpp = get<int>(cfg, "cells_per_period");
        if (cpp < 4 || cpp % 2 != 0) throw ValidationError("config", "cells_per_period must be even and at least 4");
    }
    if (command == "asymptotics") {
        for (double s : get<std::vector<double>>(cfg, "s_list"))
            if (!(s >= 1.0)) throw ValidationError("config", "s values must be >= 1");
    }
}

int run(const std::string& command, const Flags& f, const std::vector<Registered>& given, std::ostream& out) {
    Json cfg = defaults(command);
    if (!f.config.empty()) {
        const Json file = read_json_file(f.config);
        if (!file.is_object()) throw ValidationError("config", "config file must hold a JSON object");
        for (auto it = file.begin(); it != file.end(); ++it) {
            if (it.key() == "command" || it.key() == "schema_version") continue;
            if (!cfg.contains(it.key())) throw ValidationError("config", "unknown config key '" + it.key() + "'");
            cfg[it.key()] = it.value();
        }
    }

    // top-level flags, then spec parameter flags
    Json spec_params = Json::object();
    bool n_given = false;
    for (const auto& r : given) {
        std::string name = r.option->get_single_name();
        std::replace(name.begin(), name.end(), '-', '_');
        if (name == "config") continue;
        if (name == "alpha" || name == "s" || name == "a" || name == "delta" || name == "xi" || name == "entries" ||
            name == "center") {
            spec_params[name] = r.value();
            continue;
        }
        if (name == "a1" || name == "a2") spec_params[name] = r.value();
        if (name == "n") n_given = true;
        cfg[name] = r.value();
    }

    Json spec_json;
    if (command != "asymptotics") {
        const int n = get<int>(cfg, "n");
        spec_json = spec_source(cfg.at("spec"), n);
        if (n_given) spec_json["dim"] = n;
        if (!spec_json.contains("params")) spec_json["params"] = Json::object();
        for (auto it = spec_params.begin(); it != spec_params.end(); ++it) {
            std::string key = it.key();
            Json value = it.value();
            if (key == "entries") {
                try {
                    value = Json::parse(value.get<std::string>());
                } catch (const Json::exception& e) {
                    throw ValidationError("json", std::string("--entries: ") + e.what());
                }
            }
            if ((key == "a1" || key == "a2") && spec_json.value("variant", "") != "a_s_family") continue;
            if (key == "a" && spec_json.value("variant", "") == "scalar_times_identity") {
                if (value.size() != 1) throw ValidationError("spec", "scalar_times_identity takes one --a");
                value = value.at(0);
            }
            spec_json["params"][key] = value;
        }
        const CoefficientSpec s = spec_from_json(spec_json);
        cfg["spec"] = spec_to_json(s);
        cfg["n"] = s.dim;
    }
    check_config(command, cfg);

    Outputs res;
    if (command == "asymptotics") {
        res = run_asymptotics(cfg);
    } else {
        const CoefficientSpec s = spec_from_json(cfg.at("spec"));
        if (command == "rates") res = run_rates(cfg, s);
        else if (command == "gallery") res = run_gallery(cfg, s);
        else res = run_homogenize(command, cfg, s);
    }

    std::string text;
    if (get<std::string>(cfg, "format") == "csv") {
        text = res.csv;
    } else {
        Json doc{{"schema_version", kSchemaVersion}, {"command", command}, {"config", cfg}, {"result", res.result}};
        text = dump(doc) + "\n";
    }
    const auto path = get<std::string>(cfg, "output");
    if (path.empty()) {
        out << text;
    } else {
        std::ofstream file(path, std::ios::binary);
        if (!file) throw ValidationError("file", "cannot write " + path);
        file << text;
    }
    return ExitCode::ok;
}

}  // namespace

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Periodic homogenization of non-divergence elliptic operators"};
    app.require_subcommand(1);
    app.footer(kCsvHelp);
    Flags f;
    std::map<std::string, std::vector<Registered>> options;

    auto add_common = [&](CLI::App* sub, bool with_spec) {
        auto& reg = options[sub->get_name()];
        auto add = [&](CLI::Option* o, std::function<Json()> v) { reg.push_back({o, std::move(v)}); };
        add(sub->add_option("--config", f.config, "JSON config file; flags override its values"), [&] { return Json(f.config); });
        add(sub->add_option("--N", f.N, "torus grid nodes per axis (even, >= 4)"), [&] { return Json(f.N); });
        add(sub->add_option("--tol", f.tol, "relative residual tolerance"), [&] { return Json(f.tol); });
        add(sub->add_option("--format", f.format, "json or csv"), [&] { return Json(f.format); });
        add(sub->add_option("--output,-o", f.output, "output file (default stdout)"), [&] { return Json(f.output); });
        if (!with_spec) return;
        add(sub->add_option("--spec", f.spec, "variant name, inline JSON or JSON file"), [&] { return Json(f.spec); });
        add(sub->add_option("--n", f.n, "dimension for named specs"), [&] { return Json(f.n); });
        add(sub->add_option("--threshold", f.threshold, "relative c-bad threshold"), [&] { return Json(f.threshold); });
        add(sub->add_option("--alpha", f.alpha, "prop31_bad: alpha(y1,y2)"), [&] { return Json(f.alpha); });
        add(sub->add_option("--s", f.s, "prop31_bad / thm16_perturbed / a_s_family: s"), [&] { return Json(f.s); });
        add(sub->add_option("--a", f.a, "scalar or diagonal entries (repeat per axis)"), [&] { return Json(f.a); });
        add(sub->add_option("--delta", f.delta, "thm16_perturbed: delta"), [&] { return Json(f.delta); });
        add(sub->add_option("--xi", f.xi, "thm16_perturbed: xi(t)"), [&] { return Json(f.xi); });
        add(sub->add_option("--entries", f.entries, "matrix of expressions as a JSON array"), [&] { return Json(f.entries); });
        add(sub->add_option("--center", f.center, "shifted_even: center")->delimiter(','), [&] { return Json(f.center); });
        add(sub->add_option("--a1", f.a1, "a_s_family: a1"), [&] { return Json(f.a1); });
        add(sub->add_option("--a2", f.a2, "a_s_family: a2"), [&] { return Json(f.a2); });
    };

    for (const auto& [name, desc] : std::vector<std::pair<std::string, std::string>>{
             {"classify", "c-good / c-bad verdict with the obstruction tensor"},
             {"effective", "invariant measure and effective matrix"},
             {"cell", "cell correctors"},
             {"gallery", "realize a coefficient family and report its side data"}}) {
        add_common(app.add_subcommand(name, desc), true);
    }
    auto* rates = app.add_subcommand("rates", "eps sweep of the Dirichlet errors and fitted slopes");
    add_common(rates, true);
    options["rates"].push_back({rates->add_option("--eps", f.eps, "1/eps values, e.g. 4,8,16,32")->delimiter(','),
                                [&] { return Json(f.eps); }});
    options["rates"].push_back({rates->add_option("--cells-per-period", f.cells_per_period, "eps/h"),
                                [&] { return Json(f.cells_per_period); }});
    options["rates"].push_back({rates->add_option("--data", f.data, "manufactured data, cubic:j,k,l (1-based)"),
                                [&] { return Json(f.data); }});

    auto* asym = app.add_subcommand("asymptotics", "distance of r^s to the limit measure as s grows");
    add_common(asym, false);
    options["asymptotics"].push_back({asym->add_option("--a1", f.a1, "a1(y1,y2)"), [&] { return Json(f.a1); }});
    options["asymptotics"].push_back({asym->add_option("--a2", f.a2, "a2(y1,y2)"), [&] { return Json(f.a2); }});
    options["asymptotics"].push_back(
        {asym->add_option("--s-list", f.s_list, "increasing s values")->delimiter(','), [&] { return Json(f.s_list); }});

    auto fail = [&](const Json& j, int code) {
        err << dump(j, -1) << '\n';
        return code;
    };

    std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return ExitCode::ok;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return ExitCode::ok;
    } catch (const CLI::ParseError& e) {
        return fail(Json{{"error", "usage"}, {"message", e.what()}, {"details", Json::object()}},
                    ExitCode::validation_failure);
    }

    const auto subs = app.get_subcommands();
    const std::string command = subs.front()->get_name();
    std::vector<Registered> given;
    for (const auto& r : options[command])
        if (r.option->count() > 0) given.push_back(r);

    try {
        return run(command, f, given, out);
    } catch (const ValidationError& e) {
        return fail(error_json(e), ExitCode::validation_failure);
    } catch (const NumericalError& e) {
        return fail(error_json(e), ExitCode::numerical_failure);
    } catch (const Json::exception& e) {
        return fail(Json{{"error", "json"}, {"message", e.what()}, {"details", Json::object()}},
                    ExitCode::validation_failure);
    } catch (const std::exception& e) {
        return fail(Json{{"error", "internal"}, {"message", e.what()}, {"details", Json::object()}},
                    ExitCode::numerical_failure);
    }
}

}  // namespace homog::cli

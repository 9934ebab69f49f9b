#pragma once

// Command-line front end: configuration, the five subcommands, and CSV/JSON reports.
// Needs CLI11.hpp and json.hpp on the include path.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "minnaert/general.hpp"
#include "minnaert/radial.hpp"
#include "minnaert/verify.hpp"

namespace minnaert::cli {

using json = nlohmann::ordered_json;

enum ExitCode { exit_ok = 0, exit_config = 1, exit_nonconvergence = 2, exit_verification = 3 };

enum class Command { table1, roots, sweep, general, verify };
enum class Format { csv, json };

struct RunConfig {
    Command command = Command::table1;
    Medium medium = Medium::table(1e-3);
    bool medium_given = false;
    std::optional<DimensionalMedium> dimensional;
    int dim = 3;
    std::string shape = "sphere"; // sphere | ellipsoid | circle
    std::array<double, 3> axes{1.0, 1.0, 1.0};
    int n_theta = 40, n_phi = 80, n_circle = 64;
    double k_min = 0.05, k_max = 0.12;
    std::optional<int> steps;
    int order = 2;
    int truncation = default_truncation;
    Format format = Format::csv;
    std::string out;
    std::optional<cplx> guess;
    unsigned seed = 0;
};

inline std::string to_string(Command c) {
    switch (c) {
    case Command::table1: return "table1";
    case Command::roots: return "roots";
    case Command::sweep: return "sweep";
    case Command::general: return "general";
    case Command::verify: return "verify";
    }
    return "unknown";
}

inline ShapeDescriptor shape_descriptor(const RunConfig& c) {
    if (c.shape == "circle") return ShapeDescriptor::circle(c.n_circle);
    if (c.shape == "ellipsoid")
        return ShapeDescriptor::ellipsoid(c.axes[0], c.axes[1], c.axes[2], c.n_theta, c.n_phi);
    return ShapeDescriptor::sphere(c.n_theta, c.n_phi);
}

/// Rejects inconsistent combinations.
inline void validate(const RunConfig& c) {
    c.medium.validate();
    if (c.dim != 2 && c.dim != 3) throw ConfigError("--dim must be 2 or 3");
    if (c.dim == 2 && c.shape != "circle") throw ConfigError("dimension 2 requires the unit circle");
    if (c.dim == 3 && c.shape == "circle") throw ConfigError("the unit circle is a two-dimensional shape");
    if ((c.command == Command::general || c.command == Command::verify) && c.dim != 3)
        throw ConfigError(to_string(c.command) + " runs in three dimensions only");
    if (c.shape == "ellipsoid")
        for (double a : c.axes)
            if (!(a > 0.0)) throw ConfigError("--axes must be positive");
    if (c.steps && *c.steps < 1) throw ConfigError("--steps must be positive");
    if (c.command == Command::sweep || c.command == Command::general) {
        if (!(c.k_min > 0.0) || !(c.k_max >= c.k_min)) throw ConfigError("need 0 < kmin <= kmax");
    }
    detail::validate(shape_descriptor(c));
    if (c.order < 0 || c.order > max_construction_order) throw ConfigError("--order must be in 0..6");
    if (c.truncation < c.order + 2 || c.truncation > max_series_order)
        throw ConfigError("--truncation must be in order+2..12");
}

/// Uses the radial closed forms (unit disk / unit ball) rather than the quadrature pipeline.
inline bool radial_shape(const RunConfig& c) { return c.shape == "sphere" || c.shape == "circle"; }

// ---------------------------------------------------------------------------
// Reports

using Value = std::variant<std::string, long long, double, cplx, bool>;

struct Row {
    std::vector<std::pair<std::string, Value>> cells;
    Row& add(const std::string& name, Value v) {
        cells.emplace_back(name, std::move(v));
        return *this;
    }
};

struct Report {
    json config = json::object();
    std::vector<Row> rows;
    json diagnostics = json::object();
};

inline std::string fmt9(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", x + 0.0);
    return buf;
}

/// A double rounded to nine significant digits, so that JSON and CSV carry the same values.
inline double round9(double x) {
    if (!std::isfinite(x)) return x;
    return std::stod(fmt9(x));
}

inline json to_json(const Value& v) {
    return std::visit(
        [](const auto& x) -> json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, cplx>) {
                json o = json::object();
                o["re"] = round9(x.real());
                o["im"] = round9(x.imag());
                return o;
            } else if constexpr (std::is_same_v<T, double>) {
                if (!std::isfinite(x)) return fmt9(x);
                return round9(x);
            } else {
                return x;
            }
        },
        v);
}

inline json to_json(cplx z) { return to_json(Value(z)); }

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

inline void write_csv(std::ostream& os, const Report& r) {
    if (r.rows.empty()) return;
    std::vector<std::string> header;
    for (const auto& [name, v] : r.rows.front().cells) {
        if (std::holds_alternative<cplx>(v)) {
            header.push_back(name + "_re");
            header.push_back(name + "_im");
        } else {
            header.push_back(name);
        }
    }
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const Row& row : r.rows) {
        bool first = true;
        auto put = [&](const std::string& s) {
            os << (first ? "" : ",") << s;
            first = false;
        };
        for (const auto& [name, v] : row.cells) {
            std::visit(
                [&](const auto& x) {
                    using T = std::decay_t<decltype(x)>;
                    if constexpr (std::is_same_v<T, cplx>) {
                        put(fmt9(x.real()));
                        put(fmt9(x.imag()));
                    } else if constexpr (std::is_same_v<T, double>) {
                        put(fmt9(x));
                    } else if constexpr (std::is_same_v<T, bool>) {
                        put(x ? "true" : "false");
                    } else if constexpr (std::is_same_v<T, long long>) {
                        put(std::to_string(x));
                    } else {
                        put(csv_quote(x));
                    }
                },
                v);
        }
        os << '\n';
    }
}

inline json report_json(const Report& r) {
    json rows = json::array();
    for (const Row& row : r.rows) {
        json o = json::object();
        for (const auto& [name, v] : row.cells) o[name] = to_json(v);
        rows.push_back(o);
    }
    json out = json::object();
    out["config"] = r.config;
    out["rows"] = rows;
    out["diagnostics"] = r.diagnostics;
    return out;
}

inline void write_report(std::ostream& os, const Report& r, Format f) {
    if (f == Format::json)
        os << report_json(r).dump(2) << '\n';
    else
        write_csv(os, r);
}

inline json medium_json(const Medium& m) {
    json o = json::object();
    o["delta"] = round9(m.delta);
    o["mu"] = round9(m.mu);
    o["lambda"] = round9(m.lambda);
    o["tau"] = round9(m.tau);
    return o;
}

inline json config_json(const RunConfig& c) {
    json o = json::object();
    o["command"] = to_string(c.command);
    o["medium"] = medium_json(c.medium);
    o["dim"] = c.dim;
    o["shape"] = c.shape;
    if (c.shape == "ellipsoid") o["axes"] = {c.axes[0], c.axes[1], c.axes[2]};
    if (c.shape == "circle")
        o["resolution"] = {c.n_circle};
    else
        o["resolution"] = {c.n_theta, c.n_phi};
    if (c.command == Command::sweep || c.command == Command::general) {
        o["kmin"] = round9(c.k_min);
        o["kmax"] = round9(c.k_max);
    }
    if (c.steps) o["steps"] = *c.steps;
    o["order"] = c.order;
    o["truncation"] = c.truncation;
    if (c.guess) o["guess"] = to_json(*c.guess);
    o["seed"] = c.seed;
    return o;
}

inline json warnings_json(const Medium& m) {
    json w = json::array();
    for (const std::string& s : m.regime_warnings()) w.push_back(s);
    return w;
}

inline std::vector<double> k_grid(const RunConfig& c, int default_steps) {
    const int n = c.steps.value_or(default_steps);
    std::vector<double> g;
    if (n == 1 || c.k_max == c.k_min) return {c.k_min};
    for (int i = 0; i < n; ++i) g.push_back(c.k_min + (c.k_max - c.k_min) * i / (n - 1));
    return g;
}

// ---------------------------------------------------------------------------
// Commands

struct Outcome {
    Report report;
    int code = exit_ok;
    std::vector<std::string> messages; // printed on stderr
    std::optional<std::pair<std::string, json>> sidecar;
};

inline json root_json(const ResonanceResult& r) {
    json o = json::object();
    o["k"] = to_json(r.k_root);
    o["method"] = to_string(r.method);
    o["iterations"] = r.iterations;
    o["residual"] = round9(r.residual);
    o["converged"] = r.converged;
    o["physical"] = r.physical;
    return o;
}

inline Outcome cmd_table1(const RunConfig& c) {
    Outcome o;
    const std::vector<Medium> media = c.medium_given ? std::vector<Medium>{c.medium} : table1_media();
    json cells = json::array();
    for (const Medium& m : media) {
        const Table1Row row = table1_row(m);
        Row r;
        r.add("mu", m.mu).add("delta", m.delta).add("lambda", m.lambda).add("tau", m.tau);
        r.add("k_b2", row.k_b2.k_root).add("k_d2", row.k_d2.k_root).add("k_b3", row.k_b3.k_root);
        r.add("k_d3", row.k_d3.k_root);
        const bool ok = row.k_b2.converged && row.k_d2.converged && row.k_b3.converged && row.k_d3.converged;
        r.add("converged", ok);
        o.report.rows.push_back(r);
        json d = json::object();
        d["medium"] = medium_json(m);
        d["k_b2"] = root_json(row.k_b2);
        d["k_d2"] = root_json(row.k_d2);
        d["k_b3"] = root_json(row.k_b3);
        d["k_d3"] = root_json(row.k_d3);
        d["gap_3d"] = round9(std::abs(row.k_b3.k_root - row.k_d3.k_root) / std::abs(row.k_b3.k_root));
        d["gap_2d"] = round9(std::abs(row.k_b2.k_root - row.k_d2.k_root) / std::abs(row.k_b2.k_root));
        d["warnings"] = warnings_json(m);
        cells.push_back(d);
        if (!ok) {
            o.code = exit_nonconvergence;
            for (auto [name, res] : {std::pair{"k_b2", &row.k_b2}, std::pair{"k_d2", &row.k_d2},
                                     std::pair{"k_b3", &row.k_b3}, std::pair{"k_d3", &row.k_d3}})
                if (!res->converged) o.messages.push_back(std::string("not converged: ") + name + " at mu = " + fmt9(m.mu));
        }
    }
    o.report.diagnostics["cells"] = cells;
    return o;
}

inline Outcome cmd_roots(const RunConfig& c) {
    Outcome o;
    const Medium& m = c.medium;
    cplx reference;
    std::string ref_method;
    if (c.dim == 3) {
        reference = asymptotic_root_3d(m).k_plus;
        ref_method = to_string(RootMethod::asymptotic_3d);
    } else {
        reference = leading_root_2d(m).k_root;
        ref_method = to_string(RootMethod::leading_2d);
    }
    const cplx guess = c.guess.value_or(reference);
    const ResonanceResult r = find_root(c.dim, m, guess);
    Row row;
    row.add("dim", (long long)c.dim).add("k_root", r.k_root).add("k_asymptotic", reference);
    row.add("relative_gap", std::abs(r.k_root - reference) / std::abs(r.k_root));
    row.add("iterations", (long long)r.iterations).add("residual", r.residual);
    row.add("converged", r.converged).add("physical", r.physical);
    if (c.dimensional) row.add("omega", dimensional_frequency(*c.dimensional, r.k_root));
    o.report.rows.push_back(row);
    o.report.diagnostics["guess"] = to_json(guess);
    o.report.diagnostics["reference_method"] = ref_method;
    if (c.dim == 3) o.report.diagnostics["leading_root_3d"] = round9(leading_root_3d(m));
    o.report.diagnostics["warnings"] = warnings_json(m);
    if (!r.converged) {
        o.code = exit_nonconvergence;
        o.messages.push_back("root iteration did not converge after " + std::to_string(r.iterations) + " steps");
    } else if (!r.physical) {
        o.messages.push_back("root is not physical (Re k <= 0 or Im k > 0)");
    }
    return o;
}

inline json construction_json(const ResonanceModel& model, const GeometryCache& geo) {
    const ConstructionState& st = model.state();
    json d = json::object();
    json cs = json::array();
    for (cplx v : st.cs) cs.push_back(to_json(v));
    d["c"] = cs;
    const C0Report c0 = c0_value(geo, model.medium());
    d["c0_numerator"] = to_json(c0.numerator);
    d["c0_denominator"] = to_json(c0.denominator);
    json leak = json::array();
    for (double l : st.leakage) leak.push_back(round9(l));
    d["projection_leakage"] = leak;
    json w = json::array();
    for (const std::string& s : st.warnings) w.push_back(s);
    d["construction_warnings"] = w;
    d["phi0_fit"] = round9(geo.phi0_fit());
    d["medium_warnings"] = warnings_json(model.medium());
    return d;
}

inline Outcome general_scan(const RunConfig& c, int default_steps) {
    Outcome o;
    const QuadratureSurface s = build_surface(shape_descriptor(c));
    const auto geo = make_geometry(s, c.truncation);
    const ResonanceModel model(geo, c.medium, c.order);
    std::vector<cplx> grid;
    for (double k : k_grid(c, default_steps)) grid.push_back(k);
    const ScanResult scan = residual_scan(model, grid);
    for (const ScanRow& r : scan.rows) {
        Row row;
        row.add("k", r.k.real()).add("residual", r.residual).add("amplification", r.amplification);
        o.report.rows.push_back(row);
    }
    json d = construction_json(model, *geo);
    json mn = json::object();
    mn["k"] = round9(scan.minimizer.k.real());
    mn["residual"] = round9(scan.minimizer.residual);
    mn["refined"] = scan.refined;
    d["minimizer"] = mn;
    const EnhancedReport e = enhanced_condition(*geo, c.medium);
    json en = json::object();
    en["tangential_fraction"] = round9(e.tangential_fraction);
    en["solvable"] = e.solvable;
    en["k"] = to_json(e.k_roots.first);
    en["a0"] = to_json(e.a0);
    en["a1"] = to_json(e.a1);
    en["a2"] = to_json(e.a2);
    d["enhanced_condition"] = en;
    d["higher_order_condition_at_minimizer"] = round9(model.higher_order_condition(scan.minimizer.k));
    o.report.diagnostics = d;
    return o;
}

inline std::string sidecar_path(const RunConfig& c) {
    return (c.out.empty() ? std::string("sweep") : c.out) + ".diagnostics.json";
}

inline Outcome cmd_sweep(const RunConfig& c) {
    if (!radial_shape(c)) {
        Outcome o = general_scan(c, 15);
        json side = json::object();
        side["config"] = config_json(c);
        side["diagnostics"] = o.report.diagnostics;
        o.sidecar = {sidecar_path(c), side};
        return o;
    }
    Outcome o;
    const std::vector<double> g = k_grid(c, 141);
    if (g.size() < 2) throw ConfigError("a radial sweep needs kmin < kmax and steps >= 2");
    const auto rows = amplitude_sweep(c.dim, c.medium, c.k_min, c.k_max, static_cast<int>(g.size()));
    for (const SweepPoint& p : rows) {
        Row row;
        row.add("k", p.k).add("amp", p.amplitude);
        o.report.rows.push_back(row);
    }
    const SweepPoint peak = sweep_peak(rows);
    o.report.diagnostics["peak_k"] = round9(peak.k);
    o.report.diagnostics["peak_amp"] = round9(peak.amplitude);
    o.report.diagnostics["warnings"] = warnings_json(c.medium);
    return o;
}

inline Outcome cmd_general(const RunConfig& c) { return general_scan(c, 15); }

inline Outcome cmd_verify(const RunConfig& c) {
    Outcome o;
    const QuadratureSurface s = build_surface(shape_descriptor(c));
    verify::Options opt;
    opt.seed = c.seed;
    const std::vector<verify::Check> checks = verify::run(s, c.medium, opt);
    for (const verify::Check& ch : checks) {
        Row row;
        row.add("check", ch.name).add("measured", ch.measured).add("tolerance", ch.tolerance);
        row.add("status", verify::to_string(ch.status));
        o.report.rows.push_back(row);
        if (ch.status == verify::Status::fail) o.messages.push_back("failed: " + ch.name + " (" + fmt9(ch.measured) + ")");
    }
    o.report.diagnostics["jump_tolerance"] = round9(verify::jump_tolerance(s, opt));
    o.report.diagnostics["all_passed"] = verify::all_passed(checks);
    if (!verify::all_passed(checks)) o.code = exit_verification;
    return o;
}

inline Outcome execute(const RunConfig& c) {
    validate(c);
    Outcome o;
    switch (c.command) {
    case Command::table1: o = cmd_table1(c); break;
    case Command::roots: o = cmd_roots(c); break;
    case Command::sweep: o = cmd_sweep(c); break;
    case Command::general: o = cmd_general(c); break;
    case Command::verify: o = cmd_verify(c); break;
    }
    o.report.config = config_json(c);
    return o;
}

// ---------------------------------------------------------------------------
// Argument parsing

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Minnaert resonances of bubbles in soft elastic materials"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "Flat key = value configuration file; command-line flags override it");

    RunConfig c;
    double delta = c.medium.delta, mu = c.medium.mu, lambda = c.medium.lambda, tau = c.medium.tau;
    DimensionalMedium dm;
    std::vector<double> axes, guess;
    std::vector<int> resolution;
    std::string format = "csv", shape;
    int steps = 0;

    auto* o_delta = app.add_option("--delta", delta, "Density contrast rho_b / rho_e");
    auto* o_mu = app.add_option("--mu", mu, "Non-dimensional shear modulus");
    auto* o_lambda = app.add_option("--lambda", lambda, "Non-dimensional compression modulus");
    auto* o_tau = app.add_option("--tau", tau, "Velocity ratio");
    auto* o_rho_b = app.add_option("--rho-b", dm.rho_b, "Bubble density (dimensional input)");
    auto* o_rho_e = app.add_option("--rho-e", dm.rho_e, "Host density (dimensional input)");
    auto* o_kappa = app.add_option("--kappa", dm.kappa, "Bulk modulus of the gas (dimensional input)");
    auto* o_lt = app.add_option("--lambda-t", dm.lambda_t, "Host Lame lambda (dimensional input)");
    auto* o_mt = app.add_option("--mu-t", dm.mu_t, "Host Lame mu (dimensional input)");
    auto* o_L = app.add_option("--length", dm.L, "Bubble length scale (dimensional input)");
    app.add_option("--dim", c.dim, "Dimension")->check(CLI::IsMember({2, 3}));
    auto* o_shape = app.add_option("--shape", shape, "sphere | ellipsoid | circle")
                        ->check(CLI::IsMember({"sphere", "ellipsoid", "circle"}));
    auto* o_axes = app.add_option("--axes", axes, "Ellipsoid semi-axes a,b,c")->delimiter(',')->expected(3);
    auto* o_res = app.add_option("--resolution", resolution, "n_theta,n_phi (3D) or n (circle)")->delimiter(',');
    app.add_option("--kmin", c.k_min, "Lower end of the k grid");
    app.add_option("--kmax", c.k_max, "Upper end of the k grid");
    auto* o_steps = app.add_option("--steps", steps, "Number of k grid points");
    app.add_option("--order", c.order, "Construction order m");
    app.add_option("--truncation", c.truncation, "Series truncation order J");
    app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", c.out, "Output file (default: standard output)");
    auto* o_guess = app.add_option("--guess", guess, "Initial root guess re,im")->delimiter(',')->expected(2);
    app.add_option("--seed", c.seed, "Seed of the randomized verification density");

    struct Sub {
        const char* name;
        const char* help;
        Command cmd;
    };
    const Sub subs[] = {{"table1", "Critical wavenumbers of the unit disk and ball", Command::table1},
                        {"roots", "Root of det B(k) for one medium", Command::roots},
                        {"sweep", "Amplitude (radial) or residual (general shape) over a real k grid", Command::sweep},
                        {"general", "Residual scan and diagnostics for a general 3D shape", Command::general},
                        {"verify", "Quadrature verification suite", Command::verify}};
    for (const Sub& s : subs) {
        CLI::App* sc = app.add_subcommand(s.name, s.help);
        const Command cmd = s.cmd;
        sc->callback([&c, cmd] { c.command = cmd; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    }

    try {
        c.medium = {delta, mu, lambda, tau};
        c.medium_given = o_delta->count() + o_mu->count() + o_lambda->count() + o_tau->count() > 0;
        if (o_rho_b->count() + o_rho_e->count() + o_kappa->count() + o_lt->count() + o_mt->count() + o_L->count() > 0) {
            if (c.medium_given) throw ConfigError("give either non-dimensional or dimensional medium parameters");
            c.dimensional = dm;
            c.medium = nondimensionalize(dm, c.dim);
            c.medium_given = true;
        }
        c.format = format == "json" ? Format::json : Format::csv;
        if (o_shape->count())
            c.shape = shape;
        else
            c.shape = c.dim == 2 ? "circle" : (o_axes->count() ? "ellipsoid" : "sphere");
        if (o_axes->count()) {
            if (c.shape != "ellipsoid") throw ConfigError("--axes applies to --shape ellipsoid");
            c.axes = {axes[0], axes[1], axes[2]};
        }
        if (o_res->count()) {
            if (c.shape == "circle") {
                if (resolution.size() != 1) throw ConfigError("--resolution for the circle is a single integer");
                c.n_circle = resolution[0];
            } else {
                if (resolution.size() != 2) throw ConfigError("--resolution expects n_theta,n_phi");
                c.n_theta = resolution[0];
                c.n_phi = resolution[1];
            }
        }
        if (o_steps->count()) c.steps = steps;
        if (o_guess->count()) c.guess = cplx(guess[0], guess[1]);

        const Outcome o = execute(c);
        if (c.out.empty()) {
            write_report(out, o.report, c.format);
        } else {
            std::ofstream f(c.out, std::ios::binary);
            if (!f) throw ConfigError("cannot open output file " + c.out);
            write_report(f, o.report, c.format);
        }
        if (o.sidecar) {
            std::ofstream f(o.sidecar->first, std::ios::binary);
            if (!f) throw ConfigError("cannot open diagnostics file " + o.sidecar->first);
            f << o.sidecar->second.dump(2) << '\n';
        }
        for (const std::string& m : o.messages) err << m << '\n';
        return o.code;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return exit_nonconvergence;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    }
}

} // namespace minnaert::cli

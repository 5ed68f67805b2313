#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dn/acceptance.hpp"
#include "dn/catalog.hpp"
#include "dn/diffops.hpp"
#include "dn/equations.hpp"
#include "dn/limits.hpp"
#include "dn/nevanlinna.hpp"
#include "dn/parse.hpp"
#include "dn/report.hpp"

namespace dn {

/// Everything a command run needs; CLI flags override file values.
struct RunConfig {
    std::string catalog_id;
    std::string equation_file;
    std::string solution_file;
    std::string experiment_file;
    ParamEnv params;

    Box grid_box{-3, 3, -3, 3};
    std::size_t grid_count = 200;
    std::vector<double> radii;
    int nodes = 2048;
    Complex eps_start{0.5, 0.0};
    double eps_ratio = 0.5;
    int eps_steps = 12;
    std::optional<Box> t_box;
    std::size_t t_count = 25;
    std::string candidate; // expression text overriding the catalog candidate
    std::string out_dir = "out";
    double tol = -1.0; // < 0: per-operation defaults
    std::string mutate;
};

// ---------------------------------------------------------------------------
// flag/file parsing
// ---------------------------------------------------------------------------

/// "a..b" or "a..b:n" -> n radii linearly spaced over [a, b].
inline std::vector<double> parse_radii(const std::string& text) {
    auto dots = text.find("..");
    if (dots == std::string::npos) throw ConfigError("radii spec must look like a..b[:n]");
    std::size_t n = 10;
    std::string rest = text.substr(dots + 2);
    auto colon = rest.find(':');
    if (colon != std::string::npos) {
        n = std::stoul(rest.substr(colon + 1));
        rest = rest.substr(0, colon);
    }
    double a = std::stod(text.substr(0, dots));
    double b = std::stod(rest);
    if (!(a > 0) || !(b >= a) || n < 1) throw ConfigError("bad radii range");
    std::vector<double> out;
    for (std::size_t k = 0; k < n; ++k)
        out.push_back(n == 1 ? a : a + (b - a) * k / static_cast<double>(n - 1));
    return out;
}

/// "box:x0,x1,y0,y1:n"
inline std::pair<Box, std::size_t> parse_grid_spec(const std::string& text) {
    if (text.rfind("box:", 0) != 0) throw ConfigError("grid spec must start with box:");
    std::string rest = text.substr(4);
    auto colon = rest.find(':');
    std::size_t n = 200;
    if (colon != std::string::npos) {
        n = std::stoul(rest.substr(colon + 1));
        rest = rest.substr(0, colon);
    }
    Box b;
    if (std::sscanf(rest.c_str(), "%lf,%lf,%lf,%lf", &b.x0, &b.x1, &b.y0, &b.y1) != 4)
        throw ConfigError("grid spec needs four comma-separated bounds");
    if (!(b.x1 > b.x0) || !(b.y1 > b.y0)) throw ConfigError("grid box is empty");
    return {b, n};
}

/// "name=expr" repeated flag into a parameter environment.
inline void add_param(ParamEnv& env, const std::string& text) {
    auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("--param expects name=value");
    std::string name = text.substr(0, eq);
    try {
        env[name] = parse(text.substr(eq + 1));
    } catch (const ParseError& e) {
        throw ConfigError("--param " + name + ": " + e.what());
    }
}

namespace detail {

inline nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

inline ParamEnv params_from_json(const nlohmann::json& j) {
    ParamEnv env;
    if (j.contains("params"))
        for (auto& [k, v] : j.at("params").items()) env[k] = parse(v.get<std::string>());
    return env;
}

inline SingularityLedger ledger_from(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) {
        SingularityLedger led;
        led.complete_radius = 0.0; // undeclared
        return led;
    }
    return j.at(key).get<SingularityLedger>();
}

} // namespace detail

/// Equation definition file: named coefficient expressions, parameter
/// bindings, form tag, optional ledgers.
inline DifferenceEquation load_equation(const std::string& path, const ParamEnv& overrides = {}) {
    auto j = detail::load_json(path);
    ParamEnv env = detail::params_from_json(j);
    for (const auto& [k, v] : overrides) env[k] = v;
    try {
        MeromorphicFunction A(parse(j.at("A").get<std::string>(), env),
                              detail::ledger_from(j, "A_ledger"), "A");
        MeromorphicFunction B(parse(j.at("B").get<std::string>(), env),
                              detail::ledger_from(j, "B_ledger"), "B");
        return DifferenceEquation(A, B, form_from_string(j.value("form", "main")));
    } catch (const ParseError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

inline MeromorphicFunction load_solution(const std::string& path, const ParamEnv& overrides = {}) {
    auto j = detail::load_json(path);
    ParamEnv env = detail::params_from_json(j);
    for (const auto& [k, v] : overrides) env[k] = v;
    try {
        return MeromorphicFunction(parse(j.at("expr").get<std::string>(), env),
                                   detail::ledger_from(j, "ledger"), j.value("label", "f"));
    } catch (const ParseError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

namespace detail {

inline void apply_mutation(DifferenceEquation& eq, const std::string& spec) {
    if (spec.empty()) return;
    if (spec.size() < 4 || (spec[0] != 'A' && spec[0] != 'B'))
        throw ConfigError("--mutate expects A|B followed by += or *= and a constant");
    char target = spec[0];
    std::string op = spec.substr(1, 2);
    Expr val;
    try {
        val = parse(spec.substr(3));
    } catch (const ParseError& e) {
        throw ConfigError(std::string("--mutate value: ") + e.what());
    }
    MeromorphicFunction& coeff = target == 'A' ? eq.A : eq.B;
    if (op == "+=") coeff.expr = coeff.expr + val;
    else if (op == "*=") coeff.expr = coeff.expr * val;
    else throw ConfigError("--mutate supports += and *=");
}

inline std::filesystem::path ensure_out_dir(const RunConfig& cfg) {
    std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
    out << j.dump(2) << '\n';
}

struct VerifyTarget {
    DifferenceEquation equation;
    std::vector<MeromorphicFunction> solutions;
};

inline VerifyTarget resolve_target(const RunConfig& cfg) {
    VerifyTarget t;
    if (!cfg.catalog_id.empty()) {
        auto e = catalog_get(cfg.catalog_id, cfg.params);
        t.equation = e.equation;
        t.solutions = e.solutions;
    } else if (!cfg.equation_file.empty()) {
        t.equation = load_equation(cfg.equation_file, cfg.params);
        if (cfg.solution_file.empty())
            throw ConfigError("--equation also needs --solution");
        t.solutions.push_back(load_solution(cfg.solution_file, cfg.params));
    } else {
        throw ConfigError("give either --catalog <id> or --equation/--solution files");
    }
    return t;
}

inline std::vector<Complex> target_grid(const VerifyTarget& t, const RunConfig& cfg) {
    std::vector<const MeromorphicFunction*> avoid = {&t.equation.A, &t.equation.B};
    for (const auto& f : t.solutions) avoid.push_back(&f);
    std::vector<Complex> shifts = {Complex(0.0, 0.0)};
    if (t.equation.form != EquationForm::ode) {
        shifts.emplace_back(1.0, 0.0);
        shifts.emplace_back(2.0, 0.0);
    }
    auto screen = [&t, shifts](Complex z) {
        for (Complex s : shifts) {
            for (const auto& f : t.solutions) {
                Value v = f(z + s);
                if (!v.is_finite() || std::abs(v.get()) > 1e8) return false;
            }
            Value a = t.equation.A(z + s), b = t.equation.B(z + s);
            if (!a.is_finite() || !b.is_finite()) return false;
        }
        return true;
    };
    return regular_grid(cfg.grid_box, cfg.grid_count, avoid, shifts, 0.05, screen);
}

/// Radii that collide with a declared pole modulus are moved outward a touch;
/// the adjusted value is what lands in the reports.
inline std::vector<double> dodge_singular_radii(std::vector<double> radii,
                                                const std::vector<const MeromorphicFunction*>& fs) {
    for (double& r : radii) {
        bool again = true;
        while (again) {
            again = false;
            for (const auto* f : fs) {
                for (const auto& rec : f->ledger.expand_in_disk(r + 1e-3)) {
                    if (std::abs(std::abs(rec.location) - r) <= 1e-6) {
                        r += std::max(1e-3, 0.002 * r);
                        again = true;
                        break;
                    }
                }
                if (again) break;
            }
        }
    }
    return radii;
}

} // namespace detail

// ---------------------------------------------------------------------------
// commands (exit status semantics: 0 pass, 1 verification failure; config
// errors throw ConfigError and the CLI maps them to exit 2)
// ---------------------------------------------------------------------------

/// verify: residual sweep per solution; CSV per solution + JSON summary.
inline int cmd_verify(const RunConfig& cfg) {
    auto target = detail::resolve_target(cfg);
    detail::apply_mutation(target.equation, cfg.mutate);
    auto dir = detail::ensure_out_dir(cfg);
    double tol = cfg.tol > 0 ? cfg.tol : 1e-9;
    auto grid = detail::target_grid(target, cfg);

    nlohmann::json summary;
    summary["command"] = "verify";
    summary["tolerance"] = tol;
    summary["points"] = grid.size();
    auto& sols = summary["solutions"] = nlohmann::json::array();
    bool all_pass = true;
    for (const auto& f : target.solutions) {
        auto rep = residual_report(target.equation, f, grid);
        CsvWriter csv(dir / ("residuals_" + f.label + ".csv"));
        csv.row({"z_re", "z_im", "residual_re", "residual_im", "abs_residual", "scale",
                 "relative"});
        for (std::size_t k = 0; k < rep.grid.size(); ++k) {
            csv.row({fmt_g(rep.grid[k].real()), fmt_g(rep.grid[k].imag()),
                     fmt_g(rep.residuals[k].real()), fmt_g(rep.residuals[k].imag()),
                     fmt_g(std::abs(rep.residuals[k])), fmt_g(rep.scales[k]),
                     fmt_g(std::abs(rep.residuals[k]) / rep.scales[k])});
        }
        bool pass = rep.max_relative <= tol;
        all_pass = all_pass && pass;
        sols.push_back({{"label", f.label}, {"max_relative", rep.max_relative}, {"pass", pass}});
    }
    summary["pass"] = all_pass;
    detail::write_json(dir / "summary.json", summary);
    std::cout << (all_pass ? "verify: pass" : "verify: FAIL") << " (details in "
              << (dir / "summary.json").string() << ")\n";
    return all_pass ? 0 : 1;
}

/// nevanlinna: per-radius characteristic tables, growth curves, ratio trend.
inline int cmd_nevanlinna(const RunConfig& cfg) {
    auto target = detail::resolve_target(cfg);
    auto dir = detail::ensure_out_dir(cfg);
    std::vector<double> radii = cfg.radii;
    if (radii.empty()) radii = parse_radii("5..50:10");
    std::vector<const MeromorphicFunction*> fs;
    for (const auto& f : target.solutions) fs.push_back(&f);
    radii = detail::dodge_singular_radii(std::move(radii), fs);

    nlohmann::json summary;
    summary["command"] = "nevanlinna";
    summary["nodes"] = cfg.nodes;
    std::vector<PlotSeries> growth;
    std::vector<std::vector<CharacteristicEstimate>> tables;
    for (const auto& f : target.solutions) {
        CsvWriter csv(dir / ("characteristic_" + f.label + ".csv"));
        csv.row({"r", "m", "N", "T", "n", "n_bar", "n_odd", "n_bar_odd", "quad_error"});
        PlotSeries series{"T(r) " + f.label, {}};
        std::vector<CharacteristicEstimate> table;
        for (double r : radii) {
            auto est = characteristic_T(f, r, cfg.nodes);
            auto cnt = counting(f, r);
            csv.row({fmt_g(r), fmt_g(est.m), fmt_g(est.N), fmt_g(est.T),
                     std::to_string(cnt.n), std::to_string(cnt.n_bar), std::to_string(cnt.n_odd),
                     std::to_string(cnt.n_bar_odd), fmt_g(est.quad_error)});
            series.points.emplace_back(r, est.T);
            table.push_back(est);
        }
        growth.push_back(std::move(series));
        tables.push_back(std::move(table));
    }
    write_svg_chart(dir / "growth.svg", "characteristic growth", "r", "T(r)", growth);

    if (target.solutions.size() >= 2) {
        auto rep = growth_ratio(target.solutions[0], target.solutions[1], radii, cfg.nodes);
        CsvWriter csv(dir / "ratio.csv");
        csv.row({"r", "T1", "T2", "ratio"});
        PlotSeries rs{"T1/T2", {}};
        for (const auto& p : rep.points) {
            csv.row({fmt_g(p.r), fmt_g(p.T1), fmt_g(p.T2), fmt_g(p.ratio)});
            rs.points.emplace_back(p.r, p.ratio);
        }
        write_svg_chart(dir / "ratio.svg", "characteristic ratio", "r", "T1/T2", {rs});
        summary["final_ratio"] = rep.final_ratio;
        summary["drift"] = rep.drift;
        summary["trend"] =
            std::abs(rep.final_ratio - 1.0) <= 0.05 ? "converging" : "growth-separated";
    }
    // measured N-slope note for pole-bearing functions
    for (std::size_t s = 0; s < target.solutions.size(); ++s) {
        if (tables[s].back().N > 0.0 && radii.size() >= 3) {
            std::vector<double> rs_, ns_;
            for (std::size_t k = 0; k < radii.size(); ++k) {
                rs_.push_back(radii[k]);
                ns_.push_back(tables[s][k].N);
            }
            summary["N_slope_" + target.solutions[s].label] = fit_slope(rs_, ns_);
        }
    }
    detail::write_json(dir / "summary.json", summary);
    std::cout << "nevanlinna: wrote " << (dir / "summary.json").string() << "\n";
    return 0;
}

/// casoratian: H, its 1-periodicity, and the quartic relation on a pair.
inline int cmd_casoratian(const RunConfig& cfg) {
    auto target = detail::resolve_target(cfg);
    if (target.solutions.size() < 2)
        throw ConfigError("casoratian needs an entry with two solutions");
    auto dir = detail::ensure_out_dir(cfg);
    auto grid = detail::target_grid(target, cfg);
    Expr f1 = target.solutions[0].expr, f2 = target.solutions[1].expr;
    Expr H = casoratian(f1, f2);

    CsvWriter csv(dir / "casoratian.csv");
    csv.row({"z_re", "z_im", "H_re", "H_im", "relation_rel", "xi_first_rel", "xi_second_rel"});
    double worst44 = 0.0, worst_xi1 = 0.0, worst_xi2 = 0.0;
    Complex mean(0.0, 0.0);
    for (Complex z : grid) {
        Complex h = H(z).get();
        auto r44 = relation_4_4_defect_scaled(target.equation, f1, f2, H, z);
        auto xi = xi_defect(target.equation, f1, f2, H, z);
        worst44 = std::max(worst44, r44.relative());
        worst_xi1 = std::max(worst_xi1, xi.first.relative());
        worst_xi2 = std::max(worst_xi2, xi.second.relative());
        mean += h;
        csv.row({fmt_g(z.real()), fmt_g(z.imag()), fmt_g(h.real()), fmt_g(h.imag()),
                 fmt_g(r44.relative()), fmt_g(xi.first.relative()),
                 fmt_g(xi.second.relative())});
    }
    mean /= static_cast<double>(grid.size());
    double period_defect = periodicity_defect(H, Complex(1.0, 0.0), grid);
    double period_scale = grid_scale(H, grid);
    double tol = cfg.tol > 0 ? cfg.tol : 1e-8;
    bool pass = worst44 <= tol && period_defect <= 1e-9 * period_scale;

    nlohmann::json summary;
    summary["command"] = "casoratian";
    for (std::size_t k = 0; k < 2; ++k) {
        auto cls = classify_dichotomy(target.equation, target.solutions[k], grid);
        summary["dichotomy_" + target.solutions[k].label] = to_cstr(cls.cls);
    }
    summary["H_mean_re"] = mean.real();
    summary["H_mean_im"] = mean.imag();
    summary["periodicity_defect"] = period_defect;
    summary["relation_max_relative"] = worst44;
    summary["xi_first_max_relative"] = worst_xi1;
    summary["xi_second_max_relative"] = worst_xi2;
    summary["pass"] = pass;
    detail::write_json(dir / "summary.json", summary);
    std::cout << (pass ? "casoratian: pass" : "casoratian: FAIL") << "\n";
    return pass ? 0 : 1;
}

namespace detail {

inline LimitExperiment experiment_from_config(const RunConfig& cfg) {
    LimitExperiment exp;
    auto sched = geometric_schedule(cfg.eps_start, cfg.eps_ratio, cfg.eps_steps);
    if (!cfg.experiment_file.empty()) {
        auto j = load_json(cfg.experiment_file);
        ParamEnv env = params_from_json(j);
        RunConfig inner = cfg;
        inner.experiment_file.clear();
        inner.params = env;
        if (j.contains("catalog")) inner.catalog_id = j.at("catalog").get<std::string>();
        if (j.contains("candidate")) inner.candidate = j.at("candidate").get<std::string>();
        if (j.contains("eps")) {
            const auto& e = j.at("eps");
            inner.eps_start = Complex(e.value("start", 0.5), 0.0);
            inner.eps_ratio = e.value("ratio", 0.5);
            inner.eps_steps = e.value("steps", 12);
        }
        if (j.contains("t_grid")) {
            const auto& g = j.at("t_grid");
            inner.t_box = Box{g.at("x0").get<double>(), g.at("x1").get<double>(),
                              g.at("y0").get<double>(), g.at("y1").get<double>()};
            inner.t_count = g.value("count", 25);
        }
        if (j.contains("A_family") && j.contains("B_family")) {
            // indirect connection: the user supplies the coefficient families
            // as expressions in t with `eps` bound per step
            std::string ta = j.at("A_family").get<std::string>();
            std::string tb = j.at("B_family").get<std::string>();
            if (inner.candidate.empty())
                throw ConfigError("an indirect experiment needs a candidate");
            std::string tw = inner.candidate;
            auto with_eps = [env](const std::string& text, Complex eps) {
                ParamEnv e = env;
                e["eps"] = Expr::constant(eps);
                return parse(text, e);
            };
            exp.coefficients = [ta, tb, with_eps](Complex eps) {
                return std::pair<MeromorphicFunction, MeromorphicFunction>(
                    MeromorphicFunction(with_eps(ta, eps), {}, "A~"),
                    MeromorphicFunction(with_eps(tb, eps), {}, "B~"));
            };
            exp.candidate = [tw, with_eps](Complex eps) { return with_eps(tw, eps); };
            exp.eps_schedule = geometric_schedule(inner.eps_start, inner.eps_ratio,
                                                  inner.eps_steps);
            Box box = inner.t_box.value_or(Box{0.6, 2.6, 0.1, 0.45});
            exp.t_grid = regular_grid(box, inner.t_count);
            return exp;
        }
        if (j.contains("equation")) {
            auto eq = load_equation(j.at("equation").get<std::string>(), env);
            if (inner.candidate.empty())
                throw ConfigError("experiment with an equation file needs a candidate");
            Expr w = parse(inner.candidate, env);
            auto A = eq.A, B = eq.B;
            exp.coefficients = [A, B](Complex eps) { return scale_equation(A, B, eps); };
            exp.candidate = [w](Complex) { return w; };
            exp.eps_schedule = geometric_schedule(inner.eps_start, inner.eps_ratio,
                                                  inner.eps_steps);
            Box box = inner.t_box.value_or(Box{0.6, 2.6, 0.1, 0.45});
            exp.t_grid = regular_grid(box, inner.t_count);
            return exp;
        }
        return experiment_from_config(inner);
    }
    if (cfg.catalog_id.empty()) throw ConfigError("limit needs --catalog or --experiment");
    auto entry = catalog_get(cfg.catalog_id, cfg.params);
    if (!entry.limit) throw ConfigError("catalog entry has no limit setup");
    exp.coefficients = entry.limit->coefficients;
    if (!cfg.candidate.empty()) {
        Expr w = parse(cfg.candidate, cfg.params);
        exp.candidate = [w](Complex) { return w; };
    } else {
        exp.candidate = entry.limit->candidate;
    }
    exp.eps_schedule = sched;
    Box box = cfg.t_box.value_or(entry.limit->t_box);
    exp.t_grid = regular_grid(box, cfg.t_count ? cfg.t_count : entry.limit->t_count);
    return exp;
}

} // namespace detail

/// limit: residual-vs-eps table, log-log plot, fitted convergence order.
inline int cmd_limit(const RunConfig& cfg) {
    auto exp = detail::experiment_from_config(cfg);
    auto dir = detail::ensure_out_dir(cfg);
    auto fit = convergence_order(exp);

    CsvWriter csv(dir / "limit.csv");
    csv.row({"eps_abs", "max_residual", "mean_residual", "max_relative"});
    PlotSeries series{"max residual", {}};
    for (const auto& rec : fit.records) {
        csv.row({fmt_g(std::abs(rec.eps)), fmt_g(rec.max_residual), fmt_g(rec.mean_residual),
                 fmt_g(rec.max_relative)});
        if (rec.max_residual > 0)
            series.points.emplace_back(std::abs(rec.eps), rec.max_residual);
    }
    write_svg_chart(dir / "limit.svg", "step-equation residual", "eps", "max residual",
                    {series}, true, true);

    nlohmann::json summary;
    summary["command"] = "limit";
    summary["eps_steps"] = exp.eps_schedule.size();
    summary["t_points"] = exp.t_grid.size();
    summary["residual_underflow"] = fit.residual_underflow;
    if (std::isfinite(fit.order)) summary["order"] = fit.order;
    detail::write_json(dir / "summary.json", summary);
    std::cout << "limit: ";
    if (fit.residual_underflow)
        std::cout << "residuals at rounding floor (exact family)";
    else
        std::cout << "fitted order " << fmt_g(fit.order);
    std::cout << "\n";
    return 0;
}

/// report-all: the full acceptance battery, one JSON verdict file.
inline int cmd_report_all(const RunConfig& cfg) {
    AcceptanceOptions opt;
    opt.nodes = cfg.nodes;
    if (!cfg.radii.empty()) {
        opt.ratio_r_min = cfg.radii.front();
        opt.ratio_r_max = cfg.radii.back();
        opt.ratio_r_count = static_cast<int>(cfg.radii.size());
    }
    auto dir = detail::ensure_out_dir(cfg);
    auto results = run_acceptance(opt);
    nlohmann::json report;
    report["command"] = "report-all";
    auto& arr = report["criteria"] = nlohmann::json::array();
    int failures = 0;
    for (const auto& c : results) {
        arr.push_back({{"id", c.id},
                       {"name", c.name},
                       {"pass", c.pass},
                       {"detail", c.detail},
                       {"seconds", c.seconds}});
        if (!c.pass) ++failures;
        std::cout << (c.pass ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.name
                  << " — " << c.detail << "\n";
    }
    report["all_pass"] = failures == 0;
    detail::write_json(dir / "report.json", report);
    std::cout << (failures == 0 ? "report-all: all criteria passed"
                                : "report-all: " + std::to_string(failures) + " failed")
              << "\n";
    return failures == 0 ? 0 : 1;
}

} // namespace dn

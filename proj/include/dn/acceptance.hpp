#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "dn/catalog.hpp"
#include "dn/diffops.hpp"
#include "dn/equations.hpp"
#include "dn/limits.hpp"
#include "dn/nevanlinna.hpp"
#include "dn/parse.hpp"
#include "dn/report.hpp"

namespace dn {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    int nodes = 2048;
    double ratio_r_min = 5.0, ratio_r_max = 50.0;
    int ratio_r_count = 10;
    double slope_r_min = 20.5, slope_r_max = 95.5;
    int slope_r_count = 16;
};

namespace detail {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

inline std::string pass_detail(double worst, double tol) {
    return "worst " + fmt_g(worst) + " vs tol " + fmt_g(tol);
}

} // namespace detail

/// 1. Every catalog (equation, solution) pair: max relative residual <= 1e-9
///    over 200 regular points in [-3,3]^2, within 5 s total.
inline CriterionResult criterion_residual_suite(const AcceptanceOptions&) {
    detail::Stopwatch clock;
    CriterionResult res{1, "catalog residual suite (<=1e-9, 200 points, <=5 s)", false, "", 0};
    double worst = 0.0;
    std::string worst_at = "-";
    for (const auto& info : catalog_list()) {
        auto e = catalog_get(info.id);
        auto grid = entry_grid(e, 200);
        for (const auto& f : e.solutions) {
            auto rep = residual_report(e.equation, f, grid);
            if (rep.max_relative > worst) {
                worst = rep.max_relative;
                worst_at = info.id + "/" + f.label;
            }
        }
    }
    res.seconds = clock.seconds();
    res.pass = worst <= 1e-9 && res.seconds <= 5.0;
    res.detail = "worst " + fmt_g(worst) + " at " + worst_at + ", " + fmt_g(res.seconds) + " s";
    return res;
}

/// 2. Pointwise agreement of the main and expanded residual forms.
inline CriterionResult criterion_form_equivalence(const AcceptanceOptions&) {
    detail::Stopwatch clock;
    CriterionResult res{2, "main/expanded form equivalence (<=1e-10*scale)", false, "", 0};
    double worst = 0.0;
    for (const auto& info : catalog_list()) {
        auto e = catalog_get(info.id);
        if (e.equation.form == EquationForm::ode) continue;
        auto grid = entry_grid(e, 200);
        for (const auto& f : e.solutions) {
            for (Complex z : grid) {
                auto a = residual_main_scaled(e.equation, f, z);
                auto b = residual_expanded_scaled(e.equation, f, z);
                worst = std::max(worst, std::abs(a.value - b.value) / std::max(a.scale, b.scale));
            }
        }
    }
    res.seconds = clock.seconds();
    res.pass = worst <= 1e-10;
    res.detail = detail::pass_detail(worst, 1e-10);
    return res;
}

/// 3. Casoratian pipeline on the sine pair with a = pi/3.
inline CriterionResult criterion_casoratian_pipeline(const AcceptanceOptions&) {
    detail::Stopwatch clock;
    CriterionResult res{3, "Casoratian pipeline (H = -sin a, 1-periodic, quartic relation)",
                        false, "", 0};
    double a = kPiConst / 3.0;
    auto e = catalog_get("ex2_1", {{"a", Expr::constant(a)}});
    Expr f1 = e.solutions[0].expr, f2 = e.solutions[1].expr;
    Expr H = casoratian(f1, f2);
    auto grid = entry_grid(e, 50);
    double h_dev = 0.0, rel44 = 0.0, reduced = 0.0;
    for (Complex z : grid) {
        h_dev = std::max(h_dev, std::abs(H(z).get() + std::sin(a)));
        rel44 = std::max(rel44, relation_4_4_defect_scaled(e.equation, f1, f2, H, z).relative());
        Complex s = f1(z).get() * f1(z).get() + f2(z).get() * f2(z).get();
        reduced = std::max(reduced, std::abs(s - 1.0));
    }
    double period_defect = periodicity_defect(H, Complex(1.0, 0.0), grid);
    res.seconds = clock.seconds();
    res.pass = h_dev <= 1e-10 && period_defect <= 1e-9 && rel44 <= 1e-8 && reduced <= 1e-10;
    res.detail = "|H+sin a| " + fmt_g(h_dev) + ", period defect " + fmt_g(period_defect) +
                 ", relation " + fmt_g(rel44) + ", reduced form " + fmt_g(reduced);
    return res;
}

/// 4. Period-2 dichotomy branches on the catalog.
inline CriterionResult criterion_dichotomy(const AcceptanceOptions&) {
    detail::Stopwatch clock;
    CriterionResult res{4, "period-2 dichotomy (linear branch vs periodic branch)", false, "", 0};
    auto e1 = catalog_get("ex2_1", {{"a", Expr::constant(kPiConst / 3.0)}});
    auto g1 = entry_grid(e1, 100);
    double worst_linear = 0.0, min_defect = 1e300;
    for (const auto& f : e1.solutions) {
        for (Complex z : g1)
            worst_linear = std::max(worst_linear, residual_linear_scaled(e1.equation.A, f, z).relative());
        min_defect = std::min(min_defect, periodicity_defect(f.expr, Complex(2.0, 0.0), g1));
    }
    double worst_periodic = 0.0;
    for (const char* id : {"ex2_2", "ex2_3"}) {
        auto e = catalog_get(id);
        auto g = entry_grid(e, 100);
        const auto& f = e.solutions[0];
        double defect = periodicity_defect(f.expr, Complex(2.0, 0.0), g);
        worst_periodic = std::max(worst_periodic, defect / grid_scale(f.expr, g));
    }
    res.seconds = clock.seconds();
    res.pass = worst_linear <= 1e-9 && min_defect > 0.1 && worst_periodic <= 1e-9;
    res.detail = "linear residual " + fmt_g(worst_linear) + ", sine-pair defect " +
                 fmt_g(min_defect) + ", periodic families " + fmt_g(worst_periodic);
    return res;
}

/// 5. Quadratic (in Dg) residual and the discriminant identity for two
///    solution pairs.
inline CriterionResult criterion_section5(const AcceptanceOptions&) {
    detail::Stopwatch clock;
    CriterionResult res{5, "quadratic residual (<=1e-8) and discriminant identity (<=1e-7)",
                        false, "", 0};
    double worst_quad = 0.0, worst_disc = 0.0;

    auto check_pair = [&](const DifferenceEquation& eq, const MeromorphicFunction& a,
                          const MeromorphicFunction& f, const std::vector<Complex>& grid) {
        for (Complex z : grid) {
            worst_quad = std::max(worst_quad, quadratic_residual(eq, a, f, z).relative());
            worst_disc =
                std::max(worst_disc, discriminant_identity_defect_scaled(eq, a, f, z).relative());
        }
    };

    auto e1 = catalog_get("ex2_1", {{"a", Expr::constant(kPiConst / 3.0)}});
    check_pair(e1.equation, e1.solutions[0], e1.solutions[1], entry_grid(e1, 50));

    auto eb = catalog_get("ex2_2", {{"b", Expr::constant(1.0)}, {"b2", Expr::constant(2.0)}});
    std::vector<const MeromorphicFunction*> avoid = {&eb.solutions[0], &eb.solutions[1]};
    auto screen = [&](Complex z) {
        for (Complex s : {Complex(0.0, 0.0), Complex(1.0, 0.0)}) {
            for (const auto* f : avoid) {
                Value v = (*f)(z + s);
                if (!v.is_finite() || std::abs(v.get()) > 1e6) return false;
            }
        }
        Complex fv = eb.solutions[1](z).get(), av = eb.solutions[0](z).get();
        return std::abs(fv + av) > 1e-3 * (1.0 + std::abs(fv) + std::abs(av));
    };
    auto grid2 = regular_grid(Box{-3, 3, -3, 3}, 50, avoid,
                              {Complex(0.0, 0.0), Complex(1.0, 0.0)}, 0.05, screen);
    check_pair(eb.equation, eb.solutions[0], eb.solutions[1], grid2);

    res.seconds = clock.seconds();
    res.pass = worst_quad <= 1e-8 && worst_disc <= 1e-7;
    res.detail = "quadratic " + fmt_g(worst_quad) + ", discriminant " + fmt_g(worst_disc);
    return res;
}

/// 6. G constancy, the factorisation identity, and the odd-count invariant.
inline CriterionResult criterion_G_and_odd_counts(const AcceptanceOptions&) {
    detail::Stopwatch clock;
    CriterionResult res{6, "G(f_b) = -4, factorised G identity, odd-count invariant", false, "",
                        0};
    auto eb = catalog_get("ex2_2");
    auto gb = entry_grid(eb, 50);
    double worst_const = 0.0;
    for (Complex z : gb)
        worst_const = std::max(worst_const, std::abs(G_of(eb.equation, eb.solutions[0], z) + 4.0));

    // factorised form of G for the h = z family:
    // (h+h1)^2 (h-Q)^2 (h+Q)^2 / (4 h^3 h1 Q^2)
    auto e5 = catalog_get("ex5_1");
    Expr h = Expr::var();
    Expr h1 = h.shifted(Complex(1.0, 0.0));
    Expr Q = e5.params.at("Q");
    Expr factored = pow(h + h1, 2) * pow(h - Q, 2) * pow(h + Q, 2) /
                    (Expr::constant(4.0) * pow(h, 3) * h1 * pow(Q, 2));
    auto g5 = entry_grid(e5, 50);
    double worst_fact = 0.0;
    for (Complex z : g5) {
        Complex direct = G_of(e5.equation, e5.solutions[0], z);
        Value fv = factored(z);
        if (!fv.is_finite()) return res;
        double scale = 1.0 + std::max(std::abs(direct), std::abs(fv.get()));
        worst_fact = std::max(worst_fact, std::abs(direct - fv.get()) / scale);
    }

    auto e5pair = catalog_get("ex5_1", {{"Q2", parse("exp(2*pi*i*5*z)")}});
    const auto& G1 = e5pair.extras.at("G(f1)");
    const auto& G2 = e5pair.extras.at("G(f2)");
    bool counts_equal = true;
    for (double r : {3.0, 5.0, 8.0})
        if (N_O_bar(G1, r) != N_O_bar(G2, r)) counts_equal = false;
    double ref = N_O_bar(G1, 5.0);
    double ref_err = std::abs(ref - 2.0 * std::log(5.0));

    res.seconds = clock.seconds();
    res.pass = worst_const <= 1e-12 && worst_fact <= 1e-9 && counts_equal && ref_err <= 1e-12;
    res.detail = "G const dev " + fmt_g(worst_const) + ", factorisation " + fmt_g(worst_fact) +
                 ", counts equal " + (counts_equal ? "yes" : "no") + ", N_O_bar(5) dev " +
                 fmt_g(ref_err);
    return res;
}

/// 7. Nevanlinna numerics: proximity of e^z, the T-ratio trend, the pole
///    counting slope; within 30 s.
inline CriterionResult criterion_nevanlinna(const AcceptanceOptions& opt) {
    detail::Stopwatch clock;
    CriterionResult res{7, "Nevanlinna numerics (m, T-ratio, N slope, <=30 s)", false, "", 0};

    MeromorphicFunction expf(exp(Expr::var()), {}, "exp");
    auto [m, merr] = proximity_m(expf, 20.0, opt.nodes);
    double classical = 20.0 / kPiConst;
    double m_rel = std::abs(m - classical) / classical;

    auto e1 = catalog_get("ex2_1", {{"a", Expr::constant(kPiConst / 3.0)}});
    std::vector<double> radii;
    for (int k = 0; k < opt.ratio_r_count; ++k)
        radii.push_back(opt.ratio_r_min +
                        (opt.ratio_r_max - opt.ratio_r_min) * k / (opt.ratio_r_count - 1.0));
    auto ratio = growth_ratio(e1.solutions[0], e1.solutions[1], radii, opt.nodes);
    double ratio_dev = std::abs(ratio.final_ratio - 1.0);

    auto fb = catalog_get("ex2_2").solutions[0];
    std::vector<double> rs, Ns;
    for (int k = 0; k < opt.slope_r_count; ++k) {
        double r = opt.slope_r_min +
                   (opt.slope_r_max - opt.slope_r_min) * k / (opt.slope_r_count - 1.0);
        rs.push_back(r);
        Ns.push_back(counting(fb, r).N);
    }
    double slope = fit_slope(rs, Ns);

    res.seconds = clock.seconds();
    res.pass = m_rel <= 0.02 && ratio_dev <= 0.05 && std::abs(slope - 2.0) <= 0.1 &&
               res.seconds <= 30.0;
    res.detail = "m(20,exp) rel dev " + fmt_g(m_rel) + ", T-ratio dev " + fmt_g(ratio_dev) +
                 ", N slope " + fmt_g(slope) + " (measured; the documented value is 2r, not r)" +
                 ", " + fmt_g(res.seconds) + " s";
    return res;
}

/// 8. Continuous limit: change of variables, coefficient extrapolation,
///    convergence order, and exactness of the trigonometric family.
inline CriterionResult criterion_limits(const AcceptanceOptions&) {
    detail::Stopwatch clock;
    CriterionResult res{8, "continuous limit (identity, extrapolated coefficients, order)",
                        false, "", 0};
    auto sched = geometric_schedule(Complex(0.5, 0.0));

    // change of variables ties the z-residual to the eps^2-normalised t-residual
    auto e24 = catalog_get("ex2_4");
    double worst_cov = 0.0;
    {
        const auto& f = e24.solutions[0];
        for (double eps : {0.5, 0.0625}) {
            auto [At, Bt] = scale_equation(e24.equation.A, e24.equation.B, Complex(eps, 0.0));
            Expr w = f.expr.scaled_arg(Complex(eps, 0.0));
            auto grid = regular_grid(Box{-2.3, 2.7, 0.15, 0.45}, 20,
                                     {&e24.equation.A, &e24.equation.B, &f},
                                     {Complex(0.0, 0.0), Complex(1.0, 0.0)}, 0.06);
            for (Complex z : grid) {
                Complex lhs = residual_main(e24.equation, f, z);
                Complex rhs = eps * eps *
                              discrete_residual(At, Bt, w, Complex(eps, 0.0) * z,
                                                Complex(eps, 0.0));
                worst_cov = std::max(worst_cov, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
            }
        }
    }

    // extrapolated coefficient limits at two base points
    double worst_coeff = 0.0;
    for (Complex t : {Complex(0.8, 0.0), Complex(2.0, 0.0)}) {
        auto At_family = [&](Complex eps) {
            return scale_equation(e24.equation.A, e24.equation.B, eps).first.expr;
        };
        auto Bt_family = [&](Complex eps) {
            return scale_equation(e24.equation.A, e24.equation.B, eps).second.expr;
        };
        Complex a0 = coefficient_limit(At_family, t, sched).value;
        Complex b0 = coefficient_limit(Bt_family, t, sched).value;
        worst_coeff = std::max(worst_coeff, std::abs(a0 - 1.0 / (t * t)));
        worst_coeff = std::max(worst_coeff, std::abs(b0 - 1.0));
    }

    // w_C order: exact solution, so either a fitted order >= 0.95 or a full
    // residual underflow (which dominates any power of eps) passes
    auto e31 = catalog_get("ex3_1");
    LimitExperiment exp31;
    exp31.coefficients = e31.limit->coefficients;
    exp31.candidate = e31.limit->candidate;
    exp31.eps_schedule = sched;
    exp31.t_grid = regular_grid(e31.limit->t_box, e31.limit->t_count);
    auto fit31 = convergence_order(exp31);
    bool order_ok = false;
    std::string order_note;
    if (fit31.residual_underflow) {
        order_ok = true;
        for (const auto& rec : fit31.records)
            if (rec.max_relative > 1e-11) order_ok = false;
        order_note = order_ok ? "residual identically ~0 (exact family)" : "underflow but noisy";
    } else {
        order_ok = fit31.order >= 0.95;
        order_note = "fitted order " + fmt_g(fit31.order);
    }

    // the trigonometric family is exact at every scheduled eps
    auto e32 = catalog_get("ex3_2");
    double worst_32 = 0.0;
    {
        auto grid = regular_grid(e32.limit->t_box, 25);
        for (Complex eps : sched) {
            auto [At, Bt] = e32.limit->coefficients(eps);
            Expr w = e32.limit->candidate(eps);
            for (Complex t : grid)
                worst_32 = std::max(worst_32,
                                    discrete_residual_scaled(At, Bt, w, t, eps).relative());
        }
    }

    res.seconds = clock.seconds();
    res.pass = worst_cov <= 1e-12 && worst_coeff <= 1e-8 && order_ok && worst_32 <= 1e-10;
    res.detail = "change-of-variables " + fmt_g(worst_cov) + ", coefficient limits " +
                 fmt_g(worst_coeff) + ", " + order_note + ", step-identity residual " +
                 fmt_g(worst_32);
    return res;
}

/// 9. Argument-principle validation of every catalog ledger, plus a negative
///    control with a corrupted multiplicity.
inline CriterionResult criterion_ledgers(const AcceptanceOptions&) {
    detail::Stopwatch clock;
    CriterionResult res{9, "ledger validation on [-3,3]^2 (cell 0.5) + negative control", false,
                        "", 0};
    Box region{-3, 3, -3, 3};
    std::size_t functions = 0, failures = 0;
    std::string first_fail;
    for (const auto& info : catalog_list()) {
        auto e = catalog_get(info.id);
        std::vector<std::pair<std::string, const MeromorphicFunction*>> fns;
        fns.emplace_back("A", &e.equation.A);
        fns.emplace_back("B", &e.equation.B);
        for (const auto& f : e.solutions) fns.emplace_back(f.label, &f);
        for (auto& [label, fn] : fns) {
            ++functions;
            auto rep = validate_ledger(*fn, region, 0.5);
            if (!rep.passed) {
                ++failures;
                if (first_fail.empty()) first_fail = info.id + "/" + label;
            }
        }
    }

    // negative control: inflate the multiplicity of the pole lattice
    auto eb = catalog_get("ex2_2");
    SingularityLedger bad = eb.solutions[0].ledger;
    for (auto& lat : bad.lattices)
        if (lat.kind == SingKind::pole) lat.multiplicity = 2;
    MeromorphicFunction corrupted(eb.solutions[0].expr, bad, "corrupted");
    bool control_detected = !validate_ledger(corrupted, Box{-1.6, 1.6, -1.6, 1.6}, 0.9).passed;

    res.seconds = clock.seconds();
    res.pass = failures == 0 && control_detected;
    res.detail = fmt_g(static_cast<double>(functions)) + " ledgers, " +
                 fmt_g(static_cast<double>(failures)) + " failures" +
                 (first_fail.empty() ? "" : " (first: " + first_fail + ")") +
                 ", corruption detected " + (control_detected ? "yes" : "no") + ", " +
                 fmt_g(res.seconds) + " s";
    return res;
}

/// 10. Reparameterised solution through a 1-periodic inner shift.
inline CriterionResult criterion_reparam(const AcceptanceOptions&) {
    detail::Stopwatch clock;
    CriterionResult res{10, "1-periodic reparameterisation stays a solution (<=1e-8*scale)",
                        false, "", 0};
    double a = kPiConst / 3.0;
    auto e = catalog_get("ex2_1", {{"a", Expr::constant(a)}});
    Expr kappa = sin(Expr::constant(2.0 * kPiConst) * Expr::var());
    auto cert = segment_grid(Complex(-2.0, -0.1), Complex(2.0, 0.1), 64);
    auto fhat = periodic_reparam(e.solutions[0], kappa, cert);
    auto grid = regular_grid(Box{-3, 3, -0.3, 0.3}, 50, {}, {Complex(0.0, 0.0)});
    double worst = 0.0;
    for (Complex z : grid)
        worst = std::max(worst, residual_main_scaled(e.equation, fhat, z).relative());
    res.seconds = clock.seconds();
    res.pass = worst <= 1e-8;
    res.detail = detail::pass_detail(worst, 1e-8);
    return res;
}

/// Runs all ten criteria in order.
inline std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt = {}) {
    return {
        criterion_residual_suite(opt), criterion_form_equivalence(opt),
        criterion_casoratian_pipeline(opt), criterion_dichotomy(opt), criterion_section5(opt),
        criterion_G_and_odd_counts(opt), criterion_nevanlinna(opt), criterion_limits(opt),
        criterion_ledgers(opt), criterion_reparam(opt),
    };
}

} // namespace dn

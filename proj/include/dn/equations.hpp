#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "dn/diffops.hpp"
#include "dn/errors.hpp"
#include "dn/expr.hpp"
#include "dn/grid.hpp"
#include "dn/meromorphic.hpp"

namespace dn {

enum class EquationForm { main, expanded, linear, ode };

inline const char* to_cstr(EquationForm f) {
    switch (f) {
        case EquationForm::main: return "main";
        case EquationForm::expanded: return "expanded";
        case EquationForm::linear: return "linear";
        case EquationForm::ode: return "ode";
    }
    return "?";
}

inline EquationForm form_from_string(const std::string& s) {
    if (s == "main") return EquationForm::main;
    if (s == "expanded") return EquationForm::expanded;
    if (s == "linear") return EquationForm::linear;
    if (s == "ode") return EquationForm::ode;
    throw ConfigError("unknown equation form '" + s + "'");
}

/// Coefficient pair of one equation. For the ode form, A and B are read as
/// the tilde coefficients of (w')^2 = A (w^2 - B).
struct DifferenceEquation {
    MeromorphicFunction A, B;
    EquationForm form = EquationForm::main;

    DifferenceEquation() = default;
    DifferenceEquation(MeromorphicFunction a, MeromorphicFunction b,
                       EquationForm f = EquationForm::main)
        : A(std::move(a)), B(std::move(b)), form(f) {
        // A identically zero makes every residual vacuous; probe a fixed grid
        bool nonzero = false;
        for (int k = 0; k < 24 && !nonzero; ++k) {
            Complex z(-2.17 + 0.41 * k, 0.23 + 0.13 * (k % 5));
            Value v = A(z);
            if (v.is_finite() && std::abs(v.get()) > 1e-14) nonzero = true;
        }
        if (!nonzero) throw Error("DifferenceEquation: coefficient A vanishes on the probe grid");
    }
};

/// Residual together with the magnitude of the largest constituent term;
/// |value| / scale is the relative residual all tolerances refer to.
struct ScaledResidual {
    Complex value{};
    double scale = 1.0;
    double relative() const { return std::abs(value) / scale; }
};

namespace detail {

inline Complex need_finite(const Value& v, const char* what) {
    if (!v.is_finite()) throw SingularPoint(std::string(what) + ": evaluation hit a singularity");
    return v.get();
}

inline double term_scale(std::initializer_list<Complex> terms) {
    double m = 0.0;
    for (Complex t : terms) m = std::max(m, std::abs(t));
    return 1.0 + m;
}

} // namespace detail

/// (f(z+1)-f(z))^2 - A(z) (f(z) f(z+1) - B(z)).
inline ScaledResidual residual_main_scaled(const DifferenceEquation& eq,
                                           const MeromorphicFunction& f, Complex z) {
    using detail::need_finite;
    Complex f0 = need_finite(f(z), "residual_main f(z)");
    Complex f1 = need_finite(f(z + 1.0), "residual_main f(z+1)");
    Complex a = need_finite(eq.A(z), "residual_main A(z)");
    Complex b = need_finite(eq.B(z), "residual_main B(z)");
    Complex d = f1 - f0;
    ScaledResidual r;
    r.value = d * d - a * (f0 * f1 - b);
    r.scale = detail::term_scale({d * d, a * f0 * f1, a * b});
    return r;
}

inline Complex residual_main(const DifferenceEquation& eq, const MeromorphicFunction& f,
                             Complex z) {
    return residual_main_scaled(eq, f, z).value;
}

/// Expanded form (Df)^2 - A f Df - A f^2 + A B; pointwise equal to the main
/// residual by the identity f*Df + f^2 = f*f(z+1).
inline ScaledResidual residual_expanded_scaled(const DifferenceEquation& eq,
                                               const MeromorphicFunction& f, Complex z) {
    using detail::need_finite;
    Complex f0 = need_finite(f(z), "residual_expanded f(z)");
    Complex f1 = need_finite(f(z + 1.0), "residual_expanded f(z+1)");
    Complex a = need_finite(eq.A(z), "residual_expanded A(z)");
    Complex b = need_finite(eq.B(z), "residual_expanded B(z)");
    Complex d = f1 - f0;
    ScaledResidual r;
    r.value = d * d - a * f0 * d - a * f0 * f0 + a * b;
    r.scale = detail::term_scale({d * d, a * f0 * d, a * f0 * f0, a * b});
    return r;
}

inline Complex residual_expanded(const DifferenceEquation& eq, const MeromorphicFunction& f,
                                 Complex z) {
    return residual_expanded_scaled(eq, f, z).value;
}

/// Polynomial in g with meromorphic coefficients, ascending powers.
struct MeromorphicPolynomial {
    std::vector<MeromorphicFunction> coeffs;

    Complex operator()(Complex z, Complex g) const {
        Complex acc(0.0, 0.0);
        for (std::size_t k = coeffs.size(); k-- > 0;) {
            acc = acc * g + detail::need_finite(coeffs[k](z), "polynomial coefficient");
        }
        return acc;
    }
};

/// First-order class: (Dg)^2 + P(z, g) Dg + Q(z, g).
inline ScaledResidual residual_first_order_scaled(const MeromorphicPolynomial& P,
                                                  const MeromorphicPolynomial& Q,
                                                  const MeromorphicFunction& g, Complex z) {
    using detail::need_finite;
    Complex g0 = need_finite(g(z), "residual_first_order g(z)");
    Complex g1 = need_finite(g(z + 1.0), "residual_first_order g(z+1)");
    Complex d = g1 - g0;
    Complex pv = P(z, g0);
    Complex qv = Q(z, g0);
    ScaledResidual r;
    r.value = d * d + pv * d + qv;
    r.scale = detail::term_scale({d * d, pv * d, qv});
    return r;
}

inline Complex residual_first_order(const MeromorphicPolynomial& P, const MeromorphicPolynomial& Q,
                                    const MeromorphicFunction& g, Complex z) {
    return residual_first_order_scaled(P, Q, g, z).value;
}

/// Linear second-order form: D^2 f - A Df - A f.
inline ScaledResidual residual_linear_scaled(const MeromorphicFunction& A,
                                             const MeromorphicFunction& f, Complex z) {
    using detail::need_finite;
    Complex f0 = need_finite(f(z), "residual_linear f(z)");
    Complex f1 = need_finite(f(z + 1.0), "residual_linear f(z+1)");
    Complex f2 = need_finite(f(z + 2.0), "residual_linear f(z+2)");
    Complex a = need_finite(A(z), "residual_linear A(z)");
    Complex dd = f2 - 2.0 * f1 + f0;
    Complex d = f1 - f0;
    ScaledResidual r;
    r.value = dd - a * d - a * f0;
    r.scale = detail::term_scale({dd, a * d, a * f0});
    return r;
}

inline Complex residual_linear(const MeromorphicFunction& A, const MeromorphicFunction& f,
                               Complex z) {
    return residual_linear_scaled(A, f, z).value;
}

/// Predicted f(z+2) = (f1^3 - (2 f1 - f0) B) / (f0 f1 - B). A vanishing
/// denominator signals the period-2 branch of the dichotomy.
inline Complex forward_step(const MeromorphicFunction& B, Complex f0, Complex f1, Complex z) {
    Complex b = detail::need_finite(B(z), "forward_step B(z)");
    Complex den = f0 * f1 - b;
    double scale = detail::term_scale({f0 * f1, b});
    if (std::abs(den) <= 1e-12 * scale)
        throw DegenerateDenominator("forward_step: f0*f1 - B vanishes (period-2 branch)");
    return (f1 * f1 * f1 - (2.0 * f1 - f0) * b) / den;
}

/// Quartic Casoratian relation:
/// A ((A+4) f1^2 f2^2 - 2B (f1^2 + f2^2)) H^2 - (A B (f1^2 - f2^2))^2 - H^4.
inline ScaledResidual relation_4_4_defect_scaled(const DifferenceEquation& eq, const Expr& f1,
                                                 const Expr& f2, const Expr& H, Complex z) {
    using detail::need_finite;
    Complex a = need_finite(eq.A(z), "relation A(z)");
    Complex b = need_finite(eq.B(z), "relation B(z)");
    Complex u = need_finite(f1(z), "relation f1(z)");
    Complex v = need_finite(f2(z), "relation f2(z)");
    Complex h = need_finite(H(z), "relation H(z)");
    Complex u2 = u * u, v2 = v * v, h2 = h * h;
    Complex t1 = a * (a + 4.0) * u2 * v2 * h2;
    Complex t2 = 2.0 * a * b * (u2 + v2) * h2;
    Complex sq = a * b * (u2 - v2);
    ScaledResidual r;
    r.value = t1 - t2 - sq * sq - h2 * h2;
    r.scale = detail::term_scale({t1, t2, sq * sq, h2 * h2});
    return r;
}

inline Complex relation_4_4_defect(const DifferenceEquation& eq, const Expr& f1, const Expr& f2,
                                   const Expr& H, Complex z) {
    return relation_4_4_defect_scaled(eq, f1, f2, H, z).value;
}

/// Xi = A H f1 f2 - A B (f1^2 - f2^2) + H^2 and the two proof identities:
/// first  Xi - 2 f1 H Df2,
/// second Xi^2 - 4 f1^2 H^2 A (f2 Df2 + f2^2 - B).
struct XiDefects {
    Complex xi{};
    ScaledResidual first;
    ScaledResidual second;
};

inline XiDefects xi_defect(const DifferenceEquation& eq, const Expr& f1, const Expr& f2,
                           const Expr& H, Complex z) {
    using detail::need_finite;
    Complex a = need_finite(eq.A(z), "xi A(z)");
    Complex b = need_finite(eq.B(z), "xi B(z)");
    Complex u = need_finite(f1(z), "xi f1(z)");
    Complex v = need_finite(f2(z), "xi f2(z)");
    Complex v1 = need_finite(f2(z + 1.0), "xi f2(z+1)");
    Complex h = need_finite(H(z), "xi H(z)");
    Complex dv = v1 - v;
    XiDefects out;
    Complex t1 = a * h * u * v;
    Complex t2 = a * b * (u * u - v * v);
    out.xi = t1 - t2 + h * h;
    Complex cross = 2.0 * u * h * dv;
    out.first.value = out.xi - cross;
    out.first.scale = detail::term_scale({t1, t2, h * h, cross});
    Complex rhs = 4.0 * u * u * h * h * a * (v * dv + v * v - b);
    out.second.value = out.xi * out.xi - rhs;
    out.second.scale = detail::term_scale({out.xi * out.xi, rhs});
    return out;
}

/// w1^2 + 2c w1 w2 + w2^2 - (1 - c^2).
inline ScaledResidual relation_A_defect_scaled(const Expr& w1, const Expr& w2, Complex c,
                                               Complex t) {
    using detail::need_finite;
    Complex u = need_finite(w1(t), "relation_A w1");
    Complex v = need_finite(w2(t), "relation_A w2");
    ScaledResidual r;
    r.value = u * u + 2.0 * c * u * v + v * v - (1.0 - c * c);
    r.scale = detail::term_scale({u * u, 2.0 * c * u * v, v * v, 1.0 - c * c});
    return r;
}

inline Complex relation_A_defect(const Expr& w1, const Expr& w2, Complex c, Complex t) {
    return relation_A_defect_scaled(w1, w2, c, t).value;
}

/// Least-squares recovery of the constant in the algebraic relation. The
/// c^2 term cancels under centering, so the fit is linear:
///   p_k + c q_k + c^2 = 0  with  p = w1^2 + w2^2 - 1, q = 2 w1 w2.
struct RelationFit {
    Complex c{};
    double max_defect = 0.0;
    double scale = 1.0;
    bool consistent = false; // false = NoConsistentConstant
};

inline RelationFit fit_relation_constant(const Expr& w1, const Expr& w2,
                                         const std::vector<Complex>& sample) {
    if (sample.size() < 3) throw DegenerateSample("fit_relation_constant: need >= 3 points");
    std::vector<Complex> p, q;
    p.reserve(sample.size());
    q.reserve(sample.size());
    double scale = 1.0;
    for (Complex t : sample) {
        Complex u = detail::need_finite(w1(t), "fit w1");
        Complex v = detail::need_finite(w2(t), "fit w2");
        p.push_back(u * u + v * v - 1.0);
        q.push_back(2.0 * u * v);
        scale = std::max(scale, 1.0 + std::max(std::abs(p.back()), std::abs(q.back())));
    }
    Complex pbar(0.0, 0.0), qbar(0.0, 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) {
        pbar += p[k];
        qbar += q[k];
    }
    pbar /= static_cast<double>(p.size());
    qbar /= static_cast<double>(q.size());
    Complex num(0.0, 0.0);
    double den = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        Complex dq = q[k] - qbar;
        num += std::conj(dq) * (p[k] - pbar);
        den += std::norm(dq);
    }
    if (den <= 1e-20 * static_cast<double>(p.size()) * scale * scale)
        throw DegenerateSample("fit_relation_constant: w1*w2 is constant on the sample");
    RelationFit fit;
    fit.c = -num / den;
    fit.scale = scale;
    for (std::size_t k = 0; k < p.size(); ++k)
        fit.max_defect = std::max(fit.max_defect, std::abs(p[k] + fit.c * q[k] + fit.c * fit.c));
    fit.consistent = fit.max_defect <= 1e-6 * scale;
    return fit;
}

/// (w'(t))^2 - A(t) (w(t)^2 - B(t)), with the symbolic derivative.
inline ScaledResidual residual_ode_scaled(const MeromorphicFunction& A,
                                          const MeromorphicFunction& B, const Expr& w, Complex t) {
    using detail::need_finite;
    Complex wp = need_finite(w.derivative()(t), "residual_ode w'");
    Complex wv = need_finite(w(t), "residual_ode w");
    Complex a = need_finite(A(t), "residual_ode A(t)");
    Complex b = need_finite(B(t), "residual_ode B(t)");
    ScaledResidual r;
    r.value = wp * wp - a * (wv * wv - b);
    r.scale = detail::term_scale({wp * wp, a * wv * wv, a * b});
    return r;
}

inline Complex residual_ode(const MeromorphicFunction& A, const MeromorphicFunction& B,
                            const Expr& w, Complex t) {
    return residual_ode_scaled(A, B, w, t).value;
}

/// G(f) = (A + 4) f^2 - 4 B at one point.
inline Complex G_of(const DifferenceEquation& eq, const MeromorphicFunction& f, Complex z) {
    using detail::need_finite;
    Complex a = need_finite(eq.A(z), "G A(z)");
    Complex b = need_finite(eq.B(z), "G B(z)");
    Complex fv = need_finite(f(z), "G f(z)");
    return (a + 4.0) * fv * fv - 4.0 * b;
}

/// Moebius transform g = (f - a)/(f + a) of two solutions.
inline Complex g_transform(const MeromorphicFunction& f, const MeromorphicFunction& a, Complex z) {
    using detail::need_finite;
    Complex fv = need_finite(f(z), "g_transform f(z)");
    Complex av = need_finite(a(z), "g_transform a(z)");
    double scale = detail::term_scale({fv, av});
    Complex den = fv + av;
    if (std::abs(den) <= 1e-12 * scale)
        throw DegenerateDenominator("g_transform: f + a vanishes");
    return (fv - av) / den;
}

/// Coefficients of the quadratic in Dg satisfied by g = (f-a)/(f+a) when both
/// f and a solve the same equation.
struct QuadraticCoeffs {
    Complex C0{}, C1{}, C2{};
};

inline QuadraticCoeffs quadratic_coeffs(const DifferenceEquation& eq, const MeromorphicFunction& a,
                                        Complex g_value, Complex z) {
    using detail::need_finite;
    Complex A = need_finite(eq.A(z), "quadratic A(z)");
    Complex B = need_finite(eq.B(z), "quadratic B(z)");
    Complex av = need_finite(a(z), "quadratic a(z)");
    Complex a1 = need_finite(a(z + 1.0), "quadratic a(z+1)");
    Complex da = a1 - av;
    Complex g = g_value;
    QuadraticCoeffs c;
    c.C0 = 4.0 * A * B * (g - 1.0) * (g - 1.0) * g;
    c.C1 = 2.0 * (g - 1.0) *
           (2.0 * A * B * (g - 1.0) + av * av * A * (g + 1.0) + da * (A + 2.0) * av * (g + 1.0));
    c.C2 = 2.0 * av * (av * A + da * (A + 2.0)) * g -
           2.0 * av * (2.0 * av + av * A + da * (A + 2.0));
    return c;
}

/// Residual of the quadratic C2 (Dg)^2 + C1 Dg + C0 for the pair (a, f).
inline ScaledResidual quadratic_residual(const DifferenceEquation& eq,
                                         const MeromorphicFunction& a,
                                         const MeromorphicFunction& f, Complex z) {
    Complex g0 = g_transform(f, a, z);
    Complex g1 = g_transform(f, a, z + 1.0);
    Complex dg = g1 - g0;
    QuadraticCoeffs c = quadratic_coeffs(eq, a, g0, z);
    ScaledResidual r;
    r.value = c.C2 * dg * dg + c.C1 * dg + c.C0;
    r.scale = detail::term_scale({c.C2 * dg * dg, c.C1 * dg, c.C0});
    return r;
}

/// Discriminant identity:
/// C1^2 - 4 C0 C2 = 64 a^4 a(z+1)^2 A G(f) / (f + a)^4.
inline ScaledResidual discriminant_identity_defect_scaled(const DifferenceEquation& eq,
                                                          const MeromorphicFunction& a,
                                                          const MeromorphicFunction& f, Complex z) {
    using detail::need_finite;
    Complex g0 = g_transform(f, a, z);
    QuadraticCoeffs c = quadratic_coeffs(eq, a, g0, z);
    Complex A = need_finite(eq.A(z), "discriminant A(z)");
    Complex av = need_finite(a(z), "discriminant a(z)");
    Complex a1 = need_finite(a(z + 1.0), "discriminant a(z+1)");
    Complex fv = need_finite(f(z), "discriminant f(z)");
    Complex G = G_of(eq, f, z);
    Complex den = fv + av;
    double dscale = detail::term_scale({fv, av});
    if (std::abs(den) <= 1e-12 * dscale)
        throw DegenerateDenominator("discriminant: f + a vanishes");
    Complex av2 = av * av;
    Complex den2 = den * den;
    Complex rhs = 64.0 * av2 * av2 * a1 * a1 * A * G / (den2 * den2);
    ScaledResidual r;
    r.value = c.C1 * c.C1 - 4.0 * c.C0 * c.C2 - rhs;
    r.scale = detail::term_scale({c.C1 * c.C1, 4.0 * c.C0 * c.C2, rhs});
    return r;
}

inline Complex discriminant_identity_defect(const DifferenceEquation& eq,
                                            const MeromorphicFunction& a,
                                            const MeromorphicFunction& f, Complex z) {
    return discriminant_identity_defect_scaled(eq, a, f, z).value;
}

/// Reparameterized solution f(kappa(z) + z) for constant-coefficient
/// equations; kappa must certify 1-periodicity on the given grid. The result
/// carries an empty, unvalidated ledger (complete_radius = 0).
inline MeromorphicFunction periodic_reparam(const MeromorphicFunction& f, const Expr& kappa,
                                            const std::vector<Complex>& certificate_grid) {
    double defect = periodicity_defect(kappa, Complex(1.0, 0.0), certificate_grid);
    double scale = grid_scale(kappa, certificate_grid);
    if (defect > 1e-9 * scale)
        throw NonPeriodicKappa("periodic_reparam: kappa is not 1-periodic on the grid (defect " +
                               std::to_string(defect) + ")");
    MeromorphicFunction out;
    out.expr = f.expr.composed_with(Expr::var() + kappa);
    out.ledger.complete_radius = 0.0; // derived; validate before use
    out.label = f.label.empty() ? "reparam" : f.label + ".reparam";
    return out;
}

/// Per-grid residual sweep.
struct ResidualReport {
    std::vector<Complex> grid;
    std::vector<Complex> residuals;
    std::vector<double> scales;
    double max_relative = 0.0;
};

/// Evaluates the residual matching eq.form at every grid point.
inline ResidualReport residual_report(const DifferenceEquation& eq, const MeromorphicFunction& f,
                                      const std::vector<Complex>& grid) {
    ResidualReport rep;
    rep.grid = grid;
    rep.residuals.reserve(grid.size());
    rep.scales.reserve(grid.size());
    for (Complex z : grid) {
        ScaledResidual r;
        switch (eq.form) {
            case EquationForm::main: r = residual_main_scaled(eq, f, z); break;
            case EquationForm::expanded: r = residual_expanded_scaled(eq, f, z); break;
            case EquationForm::linear: r = residual_linear_scaled(eq.A, f, z); break;
            case EquationForm::ode: r = residual_ode_scaled(eq.A, eq.B, f.expr, z); break;
        }
        rep.residuals.push_back(r.value);
        rep.scales.push_back(r.scale);
        rep.max_relative = std::max(rep.max_relative, r.relative());
    }
    return rep;
}

/// Classification of a solution under the period-2 dichotomy: reported from
/// grid evidence, never assumed.
enum class DichotomyClass { satisfies_linear, periodic2, both, neither };

inline const char* to_cstr(DichotomyClass c) {
    switch (c) {
        case DichotomyClass::satisfies_linear: return "satisfies_linear";
        case DichotomyClass::periodic2: return "periodic2";
        case DichotomyClass::both: return "both";
        case DichotomyClass::neither: return "neither";
    }
    return "?";
}

struct DichotomyReport {
    DichotomyClass cls = DichotomyClass::neither;
    double linear_max_relative = 0.0;
    double periodicity_defect = 0.0;
    double periodicity_scale = 1.0;
};

inline DichotomyReport classify_dichotomy(const DifferenceEquation& eq,
                                          const MeromorphicFunction& f,
                                          const std::vector<Complex>& grid,
                                          double linear_tol = 1e-9, double periodic_tol = 1e-9) {
    DichotomyReport rep;
    for (Complex z : grid)
        rep.linear_max_relative =
            std::max(rep.linear_max_relative, residual_linear_scaled(eq.A, f, z).relative());
    rep.periodicity_defect = periodicity_defect(f.expr, Complex(2.0, 0.0), grid);
    rep.periodicity_scale = grid_scale(f.expr, grid);
    bool lin = rep.linear_max_relative <= linear_tol;
    bool per = rep.periodicity_defect <= periodic_tol * rep.periodicity_scale;
    rep.cls = lin ? (per ? DichotomyClass::both : DichotomyClass::satisfies_linear)
                  : (per ? DichotomyClass::periodic2 : DichotomyClass::neither);
    return rep;
}

} // namespace dn

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dn/detail/roots.hpp"
#include "dn/diffops.hpp"
#include "dn/equations.hpp"
#include "dn/grid.hpp"
#include "dn/limits.hpp"
#include "dn/parse.hpp"

namespace dn {

inline constexpr double kPiConst = 3.14159265358979323846;

/// Strip-search radius for transcendental zero families; ledgers built this
/// way are declared complete out to kStripComplete.
inline constexpr double kStripSearchRadius = 9.5;
inline constexpr double kStripComplete = 9.0;

struct ParamSpec {
    std::string name;
    std::string description;
    std::string default_text;
};

struct CatalogInfo {
    std::string id;
    std::vector<ParamSpec> params;
    std::string notes;
};

/// Per-entry continuous-limit wiring used by the limit runner.
struct LimitSetup {
    std::function<std::pair<MeromorphicFunction, MeromorphicFunction>(Complex)> coefficients;
    std::function<Expr(Complex)> candidate;
    Box t_box{};
    std::size_t t_count = 25;
};

/// One built-in (equation, solutions, ledgers) family.
struct CatalogEntry {
    std::string id;
    DifferenceEquation equation;
    std::vector<MeromorphicFunction> solutions;
    ParamEnv params;
    std::string notes;
    std::map<std::string, MeromorphicFunction> extras; // e.g. "G(f1)"
    std::optional<LimitSetup> limit;
};

namespace detail {

inline const std::vector<Complex>& probe_points() {
    static const std::vector<Complex> pts = {
        {0.123, 0.456}, {-0.789, 0.234}, {0.345, -0.678}, {1.211, 0.117}, {-1.37, -0.221},
    };
    return pts;
}

inline std::optional<Complex> recognize_constant(const Expr& e) {
    Value v0 = e(probe_points()[0]);
    if (!v0.is_finite()) return std::nullopt;
    Expr d = e.derivative();
    for (Complex p : probe_points()) {
        Value v = e(p);
        Value dv = d(p);
        if (!v.is_finite() || !dv.is_finite()) return std::nullopt;
        double scale = 1.0 + std::abs(v0.get());
        if (std::abs(v.get() - v0.get()) > 1e-10 * scale) return std::nullopt;
        if (std::abs(dv.get()) > 1e-10 * scale) return std::nullopt;
    }
    return v0.get();
}

/// coeff * exp(2 pi i m z) with integer m >= 1, recognised through the
/// logarithmic derivative.
struct ExpForm {
    Complex coeff;
    int m = 1;
};

inline std::optional<ExpForm> recognize_exponential(const Expr& e) {
    Expr d = e.derivative();
    Complex lambda;
    bool first = true;
    for (Complex p : probe_points()) {
        Value v = e(p);
        Value dv = d(p);
        if (!v.is_finite() || !dv.is_finite() || std::abs(v.get()) < 1e-14) return std::nullopt;
        Complex ratio = dv.get() / v.get();
        if (first) {
            lambda = ratio;
            first = false;
        } else if (std::abs(ratio - lambda) > 1e-9 * (1.0 + std::abs(lambda))) {
            return std::nullopt;
        }
    }
    Complex m_est = lambda / Complex(0.0, 2.0 * kPiConst);
    long long m = std::llround(m_est.real());
    if (m < 1 || std::abs(m_est - Complex(static_cast<double>(m), 0.0)) > 1e-9)
        return std::nullopt;
    ExpForm form;
    form.m = static_cast<int>(m);
    Value at0 = e(Complex(0.0, 0.0));
    if (!at0.is_finite()) return std::nullopt;
    form.coeff = at0.get();
    for (Complex p : probe_points()) {
        Complex expect = form.coeff * std::exp(Complex(0.0, 2.0 * kPiConst * form.m) * p);
        if (std::abs(e(p).get() - expect) > 1e-9 * (1.0 + std::abs(expect))) return std::nullopt;
    }
    return form;
}

/// c0 + c1 exp(2 pi i m z); covers constants (c1 = 0, m = 1).
struct PeriodicBlock {
    Complex c0{}, c1{};
    int m = 1;
};

inline std::optional<PeriodicBlock> recognize_periodic_block(const Expr& e) {
    if (auto c = recognize_constant(e)) return PeriodicBlock{*c, Complex(0.0, 0.0), 1};
    auto dform = recognize_exponential(e.derivative());
    if (!dform) return std::nullopt;
    PeriodicBlock blk;
    blk.m = dform->m;
    blk.c1 = dform->coeff / Complex(0.0, 2.0 * kPiConst * blk.m);
    Value at0 = e(Complex(0.0, 0.0));
    if (!at0.is_finite()) return std::nullopt;
    blk.c0 = at0.get() - blk.c1;
    for (Complex p : probe_points()) {
        Complex expect = blk.c0 + blk.c1 * std::exp(Complex(0.0, 2.0 * kPiConst * blk.m) * p);
        if (std::abs(e(p).get() - expect) > 1e-9 * (1.0 + std::abs(expect))) return std::nullopt;
    }
    return blk;
}

inline bool is_identity(const Expr& e) {
    Expr d = e.derivative();
    for (Complex p : probe_points()) {
        Value v = e(p);
        Value dv = d(p);
        if (!v.is_finite() || !dv.is_finite()) return false;
        if (std::abs(v.get() - p) > 1e-12 * (1.0 + std::abs(p))) return false;
        if (std::abs(dv.get() - 1.0) > 1e-12) return false;
    }
    return true;
}

/// z-lattice of solutions of e^{alpha z} = u0: base log(u0)/alpha,
/// step 2 pi i / alpha.
inline LatticeFamily exp_lattice(Complex alpha, Complex u0, int mult, SingKind kind) {
    return {std::log(u0) / alpha, Complex(0.0, 2.0 * kPiConst) / alpha, mult, kind};
}

inline Expr param_or_default(const ParamEnv& env, const std::string& name,
                             const std::string& default_text) {
    auto it = env.find(name);
    if (it != env.end()) return it->second;
    return parse(default_text);
}

inline Complex constant_param(const ParamEnv& env, const std::string& entry,
                              const std::string& name, const std::string& default_text) {
    Expr e = param_or_default(env, name, default_text);
    auto c = recognize_constant(e);
    if (!c)
        throw ParameterConstraintViolation(entry + ": parameter '" + name +
                                           "' must be a constant");
    return *c;
}

/// Zeros of z^2 + Q^2 (simple) or of (z-Q)(z+Q) with given multiplicity,
/// declared as finite records inside the strip-search disk.
inline void declare_symmetric_zeros(SingularityLedger& led, const PeriodicBlock& q, Complex alpha,
                                    int mult) {
    // roots of z = +-(alpha * Q)(z) with Q = c1 e^{2 pi i m z} (c0 = 0) or constant
    if (std::abs(q.c1) == 0.0) {
        Complex c = alpha * q.c0;
        led.points.push_back({c, mult, SingKind::zero});
        led.points.push_back({-c, mult, SingKind::zero});
        return;
    }
    for (Complex a : {alpha * q.c1, -alpha * q.c1}) {
        for (Complex root : detail::exponential_fixed_points(a, q.m, kStripSearchRadius))
            led.points.push_back({root, mult, SingKind::zero});
    }
    led.complete_radius = kStripComplete;
}

inline void construction_check(const CatalogEntry& entry) {
    std::vector<const MeromorphicFunction*> avoid = {&entry.equation.A, &entry.equation.B};
    for (const auto& f : entry.solutions) avoid.push_back(&f);
    std::vector<Complex> shifts = {Complex(0.0, 0.0)};
    if (entry.equation.form != EquationForm::ode) shifts.push_back(Complex(1.0, 0.0));
    for (const auto& f : entry.solutions) {
        auto screen = [&](Complex z) {
            for (Complex s : shifts) {
                Value v = f(z + s);
                if (!v.is_finite() || std::abs(v.get()) > 1e8) return false;
                Value a = entry.equation.A(z + s);
                Value b = entry.equation.B(z + s);
                if (!a.is_finite() || !b.is_finite()) return false;
            }
            return true;
        };
        auto grid = regular_grid(Box{-3, 3, -3, 3}, 40, avoid, shifts, 0.05, screen);
        auto rep = residual_report(entry.equation, f, grid);
        if (rep.max_relative > 1e-9)
            throw Error(entry.id + ": construction residual check failed for '" + f.label +
                        "' (max relative " + std::to_string(rep.max_relative) + ")");
    }
}

// ---------------------------------------------------------------------------
// entry builders
// ---------------------------------------------------------------------------

inline CatalogEntry build_ex2_1(const ParamEnv& env) {
    Complex a = constant_param(env, "ex2_1", "a", "pi/3");
    if (std::abs(a.imag()) < 1e-9) {
        double k = std::round(a.real() / kPiConst);
        if (std::abs(a - Complex(k * kPiConst, 0.0)) < 1e-9)
            throw ParameterConstraintViolation("ex2_1: a must avoid integer multiples of pi");
    }
    Complex sa2 = std::sin(a / 2.0), ca2 = std::cos(a / 2.0);
    CatalogEntry e;
    e.id = "ex2_1";
    e.params = {{"a", Expr::constant(a)}};
    MeromorphicFunction A(Expr::constant(-4.0 * sa2 * sa2), {}, "A");
    MeromorphicFunction B(Expr::constant(ca2 * ca2), {}, "B");
    e.equation = DifferenceEquation(A, B, EquationForm::main);

    Expr zv = Expr::var();
    // zeros of sin(az) at k pi / a; of cos(az) at (k + 1/2) pi / a
    SingularityLedger led1, led2;
    led1.lattices.push_back({Complex(0.0, 0.0), Complex(kPiConst, 0.0) / a, 1, SingKind::zero});
    led2.lattices.push_back(
        {Complex(kPiConst / 2.0, 0.0) / a, Complex(kPiConst, 0.0) / a, 1, SingKind::zero});
    e.solutions.push_back(MeromorphicFunction(sin(Expr::constant(a) * zv), led1, "f1"));
    e.solutions.push_back(MeromorphicFunction(cos(Expr::constant(a) * zv), led2, "f2"));
    e.notes = "sine/cosine pair, constant coefficients";

    LimitSetup lim;
    lim.coefficients = [A, B](Complex eps) { return scale_equation(A, B, eps); };
    Expr f1 = e.solutions[0].expr;
    lim.candidate = [f1](Complex eps) { return f1.scaled_arg(eps); };
    lim.t_box = Box{-1.6, 1.6, 0.11, 0.42};
    e.limit = lim;
    return e;
}

inline Expr f_b_numerator(Complex b, const Expr& zv) {
    Expr epi = exp(Expr::constant(Complex(0.0, kPiConst)) * zv);
    Expr e2pi = exp(Expr::constant(Complex(0.0, 2.0 * kPiConst)) * zv);
    return Expr::constant(1.0) + Expr::constant(b) * epi - e2pi;
}

inline CatalogEntry build_ex2_2(const ParamEnv& env) {
    Complex b = constant_param(env, "ex2_2", "b", "1");
    if (std::abs(b) < 1e-12)
        throw ParameterConstraintViolation("ex2_2: b must be nonzero");
    CatalogEntry e;
    e.id = "ex2_2";
    e.params = {{"b", Expr::constant(b)}};
    MeromorphicFunction A(Expr::constant(-4.0), {}, "A");
    MeromorphicFunction B(Expr::constant(1.0), {}, "B");
    e.equation = DifferenceEquation(A, B, EquationForm::main);

    Expr zv = Expr::var();
    Expr e2pi = exp(Expr::constant(Complex(0.0, 2.0 * kPiConst)) * zv);
    auto make_solution = [&](Complex bval, const std::string& label) {
        Expr fb = f_b_numerator(bval, zv) / (e2pi - Expr::constant(1.0));
        SingularityLedger led;
        led.lattices.push_back({Complex(0.0, 0.0), Complex(1.0, 0.0), 1, SingKind::pole});
        // numerator 1 + b u - u^2 in u = e^{pi i z}; each root is a period-2 lattice
        for (auto [root, mult] :
             cluster_roots(poly_roots({Complex(1.0, 0.0), bval, Complex(-1.0, 0.0)})))
            led.lattices.push_back(exp_lattice(Complex(0.0, kPiConst), root, mult, SingKind::zero));
        return MeromorphicFunction(fb, led, label);
    };
    e.solutions.push_back(make_solution(b, "f_b"));
    if (env.count("b2")) {
        Complex b2 = constant_param(env, "ex2_2", "b2", "2");
        if (std::abs(b2) < 1e-12 || std::abs(b2 - b) < 1e-12)
            throw ParameterConstraintViolation("ex2_2: b2 must be nonzero and distinct from b");
        e.params.emplace("b2", Expr::constant(b2));
        e.solutions.push_back(make_solution(b2, "f_b2"));
    }
    e.notes = "period-2 meromorphic family with poles on the integers";

    for (std::size_t k = 0; k < e.solutions.size(); ++k) {
        Expr G = (A.expr + Expr::constant(4.0)) * pow(e.solutions[k].expr, 2) -
                 Expr::constant(4.0) * B.expr;
        e.extras.emplace("G(f" + std::to_string(k + 1) + ")", MeromorphicFunction(G, {}, "G"));
    }

    LimitSetup lim;
    lim.coefficients = [A, B](Complex eps) { return scale_equation(A, B, eps); };
    Expr fb = e.solutions[0].expr;
    lim.candidate = [fb](Complex eps) { return fb.scaled_arg(eps); };
    lim.t_box = Box{0.3, 2.3, 0.21, 0.45};
    e.limit = lim;
    return e;
}

inline CatalogEntry build_ex2_3(const ParamEnv& env) {
    Expr beta = param_or_default(env, "beta", "1+exp(2*pi*i*z)/2");
    CatalogEntry e;
    e.id = "ex2_3";
    e.params = {{"beta", beta}};

    auto blk = recognize_periodic_block(beta);
    // validity: 1-periodic, not identically 0, beta(0) != +-2, beta^2 != 4 on probes
    {
        std::vector<Complex> probe(probe_points().begin(), probe_points().end());
        double defect = periodicity_defect(beta, Complex(1.0, 0.0), probe);
        if (defect > 1e-9 * grid_scale(beta, probe))
            throw ParameterConstraintViolation("ex2_3: beta must be 1-periodic");
        bool nonzero = false;
        for (Complex p : probe) {
            Value v = beta(p);
            if (v.is_finite() && std::abs(v.get()) > 1e-9) nonzero = true;
            if (v.is_finite() && std::abs(v.get() * v.get() - 4.0) < 1e-9)
                throw ParameterConstraintViolation("ex2_3: beta^2 - 4 vanishes on the probe grid");
        }
        if (!nonzero) throw ParameterConstraintViolation("ex2_3: beta must not vanish identically");
        Value b0 = beta(Complex(0.0, 0.0));
        if (!b0.is_finite() || std::abs(b0.get() - 2.0) < 1e-9 || std::abs(b0.get() + 2.0) < 1e-9)
            throw ParameterConstraintViolation("ex2_3: beta(0) = +-2 degenerates the integer poles");
    }

    Expr Aexpr = Expr::constant(-4.0) * beta * beta / (beta * beta - Expr::constant(4.0));
    SingularityLedger a_led;
    if (blk && std::abs(blk->c1) != 0.0) {
        Complex alpha(0.0, 2.0 * kPiConst * blk->m);
        for (Complex target : {Complex(2.0, 0.0), Complex(-2.0, 0.0)}) {
            Complex u0 = (target - blk->c0) / blk->c1;
            if (std::abs(u0) > 1e-14)
                a_led.lattices.push_back(exp_lattice(alpha, u0, 1, SingKind::pole));
        }
        if (std::abs(blk->c0) > 1e-14) {
            Complex u0 = -blk->c0 / blk->c1;
            a_led.lattices.push_back(exp_lattice(alpha, u0, 2, SingKind::zero));
        }
    } else if (!blk) {
        a_led.complete_radius = 0.0; // general beta: ledger not derivable here
    }
    MeromorphicFunction A(Aexpr, a_led, "A");
    MeromorphicFunction B(Expr::constant(1.0), {}, "B");
    e.equation = DifferenceEquation(A, B, EquationForm::main);

    Expr zv = Expr::var();
    Expr epi = exp(Expr::constant(Complex(0.0, kPiConst)) * zv);
    Expr e2pi = exp(Expr::constant(Complex(0.0, 2.0 * kPiConst)) * zv);
    Expr fbeta = (Expr::constant(1.0) - beta * epi + e2pi) / (e2pi - Expr::constant(1.0));
    SingularityLedger led;
    led.lattices.push_back({Complex(0.0, 0.0), Complex(1.0, 0.0), 1, SingKind::pole});
    if (blk) {
        // numerator as a polynomial in u = e^{pi i z}:
        // 1 - (c0 + c1 u^{2m}) u + u^2 = 1 - c0 u + u^2 - c1 u^{2m+1}
        std::vector<Complex> coeffs(2 * blk->m + 2, Complex(0.0, 0.0));
        coeffs[0] = Complex(1.0, 0.0);
        coeffs[1] = -blk->c0;
        coeffs[2] += Complex(1.0, 0.0);
        coeffs[2 * blk->m + 1] -= blk->c1;
        for (auto [root, mult] : cluster_roots(poly_roots(coeffs)))
            led.lattices.push_back(exp_lattice(Complex(0.0, kPiConst), root, mult, SingKind::zero));
    } else {
        led.complete_radius = 0.0;
    }
    e.solutions.push_back(MeromorphicFunction(fbeta, led, "f_beta"));
    e.notes = "period-2 family with a 1-periodic coefficient block";

    LimitSetup lim;
    lim.coefficients = [A, B](Complex eps) { return scale_equation(A, B, eps); };
    lim.candidate = [fbeta](Complex eps) { return fbeta.scaled_arg(eps); };
    lim.t_box = Box{0.3, 2.3, 0.21, 0.45};
    e.limit = lim;
    return e;
}

/// Shared builder for the (h^2 + Q^2)/(2 h Q) family; ex2_4 is the h = z case
/// with its displayed coefficients, ex5_1 keeps h symbolic.
inline CatalogEntry build_h_family(const std::string& id, const Expr& h, const Expr& Q,
                                   const ParamEnv& resolved) {
    CatalogEntry e;
    e.id = id;
    e.params = resolved;

    bool h_is_z = is_identity(h);
    auto qblk = recognize_periodic_block(Q);
    // validity probes: Q 1-periodic and nonvanishing; h, h(z+1) nonvanishing
    {
        std::vector<Complex> probe(probe_points().begin(), probe_points().end());
        double defect = periodicity_defect(Q, Complex(1.0, 0.0), probe);
        if (defect > 1e-9 * grid_scale(Q, probe))
            throw ParameterConstraintViolation(id + ": Q must be 1-periodic");
        for (Complex p : probe) {
            Value qv = Q(p);
            if (!qv.is_finite() || std::abs(qv.get()) < 1e-9)
                throw ParameterConstraintViolation(id + ": Q must be nonvanishing");
            Value hv = h(p);
            Value h1v = h(p + 1.0);
            if (!hv.is_finite() || std::abs(hv.get()) < 1e-9 || !h1v.is_finite() ||
                std::abs(h1v.get()) < 1e-9)
                throw ParameterConstraintViolation(id + ": h and h(z+1) must be nonvanishing");
        }
        if (qblk && std::abs(qblk->c0) > 1e-14 && std::abs(qblk->c1) > 1e-14)
            throw ParameterConstraintViolation(
                id + ": Q of the form c0 + c1 exp(...) with both terms nonzero has zeros");
    }

    Expr h1 = h.shifted(Complex(1.0, 0.0));
    Expr Aexpr, Bexpr;
    SingularityLedger a_led, b_led;
    if (h_is_z) {
        Expr zv = Expr::var();
        Aexpr = Expr::constant(1.0) / (zv * (zv + Expr::constant(1.0)));
        Bexpr = pow(Expr::constant(1.0) + Expr::constant(2.0) * zv, 2) /
                (Expr::constant(4.0) * zv * (zv + Expr::constant(1.0)));
        a_led.points.push_back({Complex(0.0, 0.0), 1, SingKind::pole});
        a_led.points.push_back({Complex(-1.0, 0.0), 1, SingKind::pole});
        b_led = a_led;
        b_led.points.push_back({Complex(-0.5, 0.0), 2, SingKind::zero});
    } else {
        Aexpr = pow(h1 - h, 2) / (h * h1);
        Bexpr = pow(h1 + h, 2) / (Expr::constant(4.0) * h * h1);
        a_led.complete_radius = 0.0;
        b_led.complete_radius = 0.0;
    }
    MeromorphicFunction A(Aexpr, a_led, "A");
    MeromorphicFunction B(Bexpr, b_led, "B");
    e.equation = DifferenceEquation(A, B, EquationForm::main);

    auto add_block_solution = [&](const Expr& Qk, const std::optional<PeriodicBlock>& blk,
                                  const std::string& tag) {
        Expr f = (h * h + Qk * Qk) / (Expr::constant(2.0) * h * Qk);
        SingularityLedger f_led;
        if (h_is_z && blk) {
            f_led.points.push_back({Complex(0.0, 0.0), 1, SingKind::pole});
            declare_symmetric_zeros(f_led, *blk, Complex(0.0, 1.0), 1); // h^2+Q^2=(h-iQ)(h+iQ)
        } else {
            f_led.complete_radius = 0.0;
        }
        e.solutions.push_back(MeromorphicFunction(f, f_led, tag));

        // G(f) = (A+4) f^2 - 4B; for h = z it factors with poles 0 (order 3)
        // and -1 (order 1), a double zero at -1/2 and double zeros where z = +-Q.
        Expr G = (Aexpr + Expr::constant(4.0)) * pow(f, 2) - Expr::constant(4.0) * Bexpr;
        SingularityLedger g_led;
        if (h_is_z && blk) {
            g_led.points.push_back({Complex(0.0, 0.0), 3, SingKind::pole});
            g_led.points.push_back({Complex(-1.0, 0.0), 1, SingKind::pole});
            g_led.points.push_back({Complex(-0.5, 0.0), 2, SingKind::zero});
            declare_symmetric_zeros(g_led, *blk, Complex(1.0, 0.0), 2); // (z-Q)^2 (z+Q)^2
        } else {
            g_led.complete_radius = 0.0;
        }
        e.extras.emplace("G(" + tag + ")", MeromorphicFunction(G, g_led, "G(" + tag + ")"));
    };
    add_block_solution(Q, qblk, "f1");
    if (resolved.count("Q2")) {
        Expr Q2 = resolved.at("Q2");
        auto q2blk = recognize_periodic_block(Q2);
        for (Complex p : probe_points()) {
            Value qv = Q2(p);
            if (!qv.is_finite() || std::abs(qv.get()) < 1e-9)
                throw ParameterConstraintViolation(id + ": Q2 must be nonvanishing");
        }
        {
            std::vector<Complex> probe(probe_points().begin(), probe_points().end());
            if (periodicity_defect(Q2, Complex(1.0, 0.0), probe) >
                1e-9 * grid_scale(Q2, probe))
                throw ParameterConstraintViolation(id + ": Q2 must be 1-periodic");
        }
        add_block_solution(Q2, q2blk, "f2");
    }
    e.notes = id == "ex2_4" ? "rational-coefficient family built from a periodic block"
                            : "two-parameter family separating growth from the odd-count invariant";

    LimitSetup lim;
    lim.coefficients = [A, B](Complex eps) { return scale_equation(A, B, eps); };
    Expr f1 = e.solutions[0].expr;
    lim.candidate = [f1](Complex eps) { return f1.scaled_arg(eps); };
    lim.t_box = Box{0.55, 2.55, 0.11, 0.42};
    e.limit = lim;
    return e;
}

inline CatalogEntry build_ex2_4(const ParamEnv& env) {
    Expr Q = param_or_default(env, "Q", "exp(2*pi*i*z)");
    return build_h_family("ex2_4", Expr::var(), Q, {{"Q", Q}});
}

inline CatalogEntry build_ex5_1(const ParamEnv& env) {
    Expr h = param_or_default(env, "h", "z");
    Expr Q = param_or_default(env, "Q", "exp(2*pi*i*z)");
    ParamEnv resolved{{"h", h}, {"Q", Q}};
    if (env.count("Q2")) resolved.emplace("Q2", env.at("Q2"));
    return build_h_family("ex5_1", h, Q, resolved);
}

inline CatalogEntry build_ex3_1(const ParamEnv& env) {
    Complex C = constant_param(env, "ex3_1", "C", "1");
    if (std::abs(C) < 1e-12) throw ParameterConstraintViolation("ex3_1: C must be nonzero");
    CatalogEntry e;
    e.id = "ex3_1";
    e.params = {{"C", Expr::constant(C)}};
    Expr tv = Expr::var();
    SingularityLedger a_led;
    a_led.points.push_back({Complex(0.0, 0.0), 2, SingKind::pole});
    MeromorphicFunction A(Expr::constant(1.0) / pow(tv, 2), a_led, "A~");
    MeromorphicFunction B(Expr::constant(1.0), {}, "B~");
    e.equation = DifferenceEquation(A, B, EquationForm::ode);

    Expr w = (Expr::constant(C * C) + pow(tv, 2)) / (Expr::constant(2.0 * C) * tv);
    SingularityLedger led;
    led.points.push_back({Complex(0.0, 0.0), 1, SingKind::pole});
    led.points.push_back({Complex(0.0, 1.0) * C, 1, SingKind::zero});
    led.points.push_back({Complex(0.0, -1.0) * C, 1, SingKind::zero});
    e.solutions.push_back(MeromorphicFunction(w, led, "w_C"));
    e.notes = "degenerating-coefficient limit family";

    // the matching discrete side is the h = z family
    auto base = build_ex2_4({});
    MeromorphicFunction A24 = base.equation.A, B24 = base.equation.B;
    LimitSetup lim;
    lim.coefficients = [A24, B24](Complex eps) { return scale_equation(A24, B24, eps); };
    lim.candidate = [w](Complex) { return w; };
    lim.t_box = Box{0.6, 2.6, -0.35, 0.35};
    e.limit = lim;
    return e;
}

inline CatalogEntry build_ex3_2(const ParamEnv& env) {
    Complex phi = constant_param(env, "ex3_2", "phi", "0");
    CatalogEntry e;
    e.id = "ex3_2";
    e.params = {{"phi", Expr::constant(phi)}};
    MeromorphicFunction A(Expr::constant(-4.0), {}, "A~");
    MeromorphicFunction B(Expr::constant(1.0), {}, "B~");
    e.equation = DifferenceEquation(A, B, EquationForm::ode);

    Expr tv = Expr::var();
    SingularityLedger led1;
    led1.lattices.push_back(
        {Complex(0.0, 0.0), Complex(kPiConst / 2.0, 0.0), 1, SingKind::zero});
    e.solutions.push_back(MeromorphicFunction(sin(Expr::constant(2.0) * tv), led1, "w"));
    if (std::abs(phi) > 1e-12) {
        SingularityLedger led2;
        led2.lattices.push_back(
            {-phi / 2.0, Complex(kPiConst / 2.0, 0.0), 1, SingKind::zero});
        e.solutions.push_back(
            MeromorphicFunction(sin(Expr::constant(2.0) * tv + Expr::constant(phi)), led2,
                                "w_phi"));
    }
    e.notes = "trigonometric family; the step equation is satisfied exactly";

    // indirect connection: A~(t,eps) = -4 sin^2(eps)/eps^2, B~(t,eps) = cos^2(eps)
    Expr w0 = e.solutions[0].expr;
    LimitSetup lim;
    lim.coefficients = [](Complex eps) {
        Complex s = std::sin(eps), c = std::cos(eps);
        return std::pair<MeromorphicFunction, MeromorphicFunction>(
            MeromorphicFunction(Expr::constant(-4.0 * s * s / (eps * eps)), {}, "A~"),
            MeromorphicFunction(Expr::constant(c * c), {}, "B~"));
    };
    Expr cand = std::abs(phi) > 1e-12 ? e.solutions[1].expr : w0;
    lim.candidate = [cand](Complex) { return cand; };
    lim.t_box = Box{-2.0, 2.0, -0.4, 0.4};
    e.limit = lim;
    return e;
}

} // namespace detail

/// All entries with their parameter schemas.
inline std::vector<CatalogInfo> catalog_list() {
    return {
        {"ex2_1", {{"a", "nonzero constant, not a multiple of pi", "pi/3"}},
         "sine/cosine pair, constant coefficients"},
        {"ex2_2", {{"b", "nonzero constant", "1"},
                   {"b2", "optional second member, nonzero and distinct from b", "2"}},
         "period-2 meromorphic family with poles on the integers"},
        {"ex2_3", {{"beta", "1-periodic block c0 + c1*exp(2*pi*i*z), beta(0) != +-2",
                    "1+exp(2*pi*i*z)/2"}},
         "period-2 family with a 1-periodic coefficient block"},
        {"ex2_4", {{"Q", "1-periodic, nonvanishing (constant or c*exp(2*pi*i*m*z))",
                    "exp(2*pi*i*z)"}},
         "rational-coefficient family built from a periodic block"},
        {"ex3_1", {{"C", "nonzero constant", "1"}},
         "degenerating-coefficient limit family"},
        {"ex3_2", {{"phi", "phase constant", "0"}},
         "trigonometric family; the step equation is satisfied exactly"},
        {"ex5_1", {{"h", "meromorphic expression, nonvanishing with its shift on probes", "z"},
                   {"Q", "1-periodic, nonvanishing (constant or c*exp(2*pi*i*m*z))",
                    "exp(2*pi*i*z)"},
                   {"Q2", "optional second block for a solution pair", "exp(2*pi*i*5*z)"}},
         "two-parameter family separating growth from the odd-count invariant"},
    };
}

/// Deterministic regular-point grid for one entry: avoids every declared
/// singularity of the solutions and coefficients (including unit shifts for
/// difference forms) and screens out near-singular evaluations.
inline std::vector<Complex> entry_grid(const CatalogEntry& e, std::size_t count,
                                       Box box = Box{-3, 3, -3, 3}, std::size_t max_shift = 2) {
    std::vector<const MeromorphicFunction*> avoid = {&e.equation.A, &e.equation.B};
    for (const auto& f : e.solutions) avoid.push_back(&f);
    std::vector<Complex> shifts = {Complex(0.0, 0.0)};
    if (e.equation.form != EquationForm::ode)
        for (std::size_t s = 1; s <= max_shift; ++s) shifts.emplace_back(static_cast<double>(s), 0.0);
    auto screen = [&e, shifts](Complex z) {
        for (Complex s : shifts) {
            for (const auto& f : e.solutions) {
                Value v = f(z + s);
                if (!v.is_finite() || std::abs(v.get()) > 1e8) return false;
            }
            Value a = e.equation.A(z + s), b = e.equation.B(z + s);
            if (!a.is_finite() || !b.is_finite()) return false;
        }
        return true;
    };
    return regular_grid(box, count, avoid, shifts, 0.05, screen);
}

/// Builds one entry; every entry re-verifies its own residual suite on a
/// small grid before it is handed out.
inline CatalogEntry catalog_get(const std::string& id, const ParamEnv& params = {}) {
    CatalogEntry e;
    if (id == "ex2_1") e = detail::build_ex2_1(params);
    else if (id == "ex2_2") e = detail::build_ex2_2(params);
    else if (id == "ex2_3") e = detail::build_ex2_3(params);
    else if (id == "ex2_4") e = detail::build_ex2_4(params);
    else if (id == "ex3_1") e = detail::build_ex3_1(params);
    else if (id == "ex3_2") e = detail::build_ex3_2(params);
    else if (id == "ex5_1") e = detail::build_ex5_1(params);
    else throw UnknownEntry("catalog: unknown id '" + id + "'");
    detail::construction_check(e);
    return e;
}

} // namespace dn

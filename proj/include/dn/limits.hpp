#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "dn/equations.hpp"
#include "dn/errors.hpp"
#include "dn/expr.hpp"
#include "dn/meromorphic.hpp"

namespace dn {

/// Geometric eps schedule: start, start*ratio, ... (steps values).
inline std::vector<Complex> geometric_schedule(Complex start, double ratio = 0.5, int steps = 12) {
    if (start == Complex(0.0, 0.0)) throw Error("geometric_schedule: start must be nonzero");
    if (ratio <= 0.0 || ratio >= 1.0) throw Error("geometric_schedule: ratio must be in (0,1)");
    std::vector<Complex> out;
    Complex e = start;
    for (int k = 0; k < steps; ++k) {
        out.push_back(e);
        e *= ratio;
    }
    return out;
}

namespace detail {

inline SingularityLedger scale_ledger(const SingularityLedger& led, Complex eps) {
    SingularityLedger out;
    for (const auto& p : led.points) out.points.push_back({p.location * eps, p.multiplicity, p.kind});
    for (const auto& l : led.lattices)
        out.lattices.push_back({l.base * eps, l.step * eps, l.multiplicity, l.kind});
    out.complete_radius = led.complete_radius * std::abs(eps);
    return out;
}

} // namespace detail

/// Direct-connection rescaling: A~(t, eps) = A(t/eps)/eps^2 and
/// B~(t, eps) = B(t/eps), as expression trees in t. Ledger locations scale
/// with eps. Rejects eps = 0.
inline std::pair<MeromorphicFunction, MeromorphicFunction> scale_equation(
    const MeromorphicFunction& A, const MeromorphicFunction& B, Complex eps) {
    if (eps == Complex(0.0, 0.0)) throw Error("scale_equation: eps must be nonzero");
    MeromorphicFunction At(A.expr.scaled_arg(eps) / Expr::constant(eps * eps),
                           detail::scale_ledger(A.ledger, eps),
                           A.label.empty() ? "A~" : A.label + "~");
    MeromorphicFunction Bt(B.expr.scaled_arg(eps), detail::scale_ledger(B.ledger, eps),
                           B.label.empty() ? "B~" : B.label + "~");
    return {std::move(At), std::move(Bt)};
}

/// Discrete residual of the eps-step equation, normalised by eps^2 so it is
/// directly comparable with the ode residual:
/// [(w(t+eps) - w(t))^2 - eps^2 A~(t)(w(t) w(t+eps) - B~(t))] / eps^2.
inline ScaledResidual discrete_residual_scaled(const MeromorphicFunction& At,
                                               const MeromorphicFunction& Bt, const Expr& w,
                                               Complex t, Complex eps) {
    using detail::need_finite;
    if (eps == Complex(0.0, 0.0)) throw Error("discrete_residual: eps must be nonzero");
    Complex w0 = need_finite(w(t), "discrete_residual w(t)");
    Complex w1 = need_finite(w(t + eps), "discrete_residual w(t+eps)");
    Complex a = need_finite(At(t), "discrete_residual A~(t)");
    Complex b = need_finite(Bt(t), "discrete_residual B~(t)");
    Complex d = (w1 - w0) / eps;
    ScaledResidual r;
    r.value = d * d - a * (w0 * w1 - b);
    r.scale = detail::term_scale({d * d, a * w0 * w1, a * b});
    return r;
}

inline Complex discrete_residual(const MeromorphicFunction& At, const MeromorphicFunction& Bt,
                                 const Expr& w, Complex t, Complex eps) {
    return discrete_residual_scaled(At, Bt, w, t, eps).value;
}

/// Result of extrapolating a coefficient family to eps = 0.
struct CoefficientLimit {
    Complex value{};
    bool converged = false; // false = NonConvergent
    double last_delta = 0.0;
    std::vector<Complex> diagonal; // successive extrapolants
};

/// Polynomial extrapolation (Neville at 0) of familiy values along the eps
/// schedule; flag set when successive extrapolants settle within 1e-6*scale.
inline CoefficientLimit coefficient_limit(const std::function<Expr(Complex)>& family, Complex t,
                                          const std::vector<Complex>& schedule) {
    if (schedule.size() < 2) throw Error("coefficient_limit: need at least two eps values");
    std::vector<Complex> x = schedule;
    std::vector<Complex> p(schedule.size());
    for (std::size_t j = 0; j < schedule.size(); ++j)
        p[j] = detail::need_finite(family(schedule[j])(t), "coefficient_limit sample");

    CoefficientLimit out;
    out.diagonal.push_back(p[0]);
    // Neville tableau evaluated at eps = 0; p[i] holds column k of row i.
    std::vector<Complex> cur = p;
    for (std::size_t k = 1; k < schedule.size(); ++k) {
        for (std::size_t i = 0; i + k < schedule.size(); ++i) {
            cur[i] = (x[i] * cur[i + 1] - x[i + k] * cur[i]) / (x[i] - x[i + k]);
        }
        out.diagonal.push_back(cur[0]);
    }
    // pick the diagonal entry where successive extrapolants are closest
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_k = out.diagonal.size() - 1;
    for (std::size_t k = 1; k < out.diagonal.size(); ++k) {
        double d = std::abs(out.diagonal[k] - out.diagonal[k - 1]);
        if (d <= best) {
            best = d;
            best_k = k;
        }
    }
    out.value = out.diagonal[best_k];
    out.last_delta = best;
    out.converged = best <= 1e-6 * (1.0 + std::abs(out.value));
    return out;
}

/// One eps-row of a limit experiment.
struct EpsRecord {
    Complex eps{};
    double max_residual = 0.0;  // max |value| over the t-grid (eps^2-normalised)
    double mean_residual = 0.0;
    double max_relative = 0.0;
};

/// Continuous-limit experiment: coefficient families in t per eps, a
/// candidate solution (optionally an eps-family), an eps schedule and a
/// t-grid.
struct LimitExperiment {
    std::function<std::pair<MeromorphicFunction, MeromorphicFunction>(Complex)> coefficients;
    std::function<Expr(Complex)> candidate; // w(., eps)
    std::vector<Complex> eps_schedule;
    std::vector<Complex> t_grid;

    /// Direct connection from a base equation (A, B rescaled per step).
    static LimitExperiment direct(const MeromorphicFunction& A, const MeromorphicFunction& B,
                                  Expr w, std::vector<Complex> eps, std::vector<Complex> grid) {
        LimitExperiment e;
        e.coefficients = [A, B](Complex eps_) { return scale_equation(A, B, eps_); };
        e.candidate = [w](Complex) { return w; };
        e.eps_schedule = std::move(eps);
        e.t_grid = std::move(grid);
        return e;
    }

    /// Indirect connection: user-supplied coefficient families.
    static LimitExperiment indirect(std::function<Expr(Complex)> At_family,
                                    std::function<Expr(Complex)> Bt_family, Expr w,
                                    std::vector<Complex> eps, std::vector<Complex> grid) {
        LimitExperiment e;
        e.coefficients = [At_family, Bt_family](Complex eps_) {
            return std::pair<MeromorphicFunction, MeromorphicFunction>(
                MeromorphicFunction(At_family(eps_), {}, "A~"),
                MeromorphicFunction(Bt_family(eps_), {}, "B~"));
        };
        e.candidate = [w](Complex) { return w; };
        e.eps_schedule = std::move(eps);
        e.t_grid = std::move(grid);
        return e;
    }
};

/// Convergence-order measurement: slope of log(max residual) against
/// log |eps| over the smaller half of the schedule.
struct ConvergenceFit {
    double order = std::numeric_limits<double>::quiet_NaN();
    bool residual_underflow = false; // residuals at rounding floor too early
    std::vector<EpsRecord> records;
};

/// Relative-residual rounding floor: the eps-difference quotient amplifies
/// round-off like machine-eps/|eps|, so the floor must grow as eps shrinks.
inline double residual_floor(Complex eps) { return 1e-14 + 1e-15 / std::abs(eps); }

inline ConvergenceFit convergence_order(const LimitExperiment& exp) {
    if (exp.eps_schedule.empty() || exp.t_grid.empty())
        throw Error("convergence_order: experiment needs eps values and a t-grid");
    ConvergenceFit fit;
    for (Complex eps : exp.eps_schedule) {
        auto [At, Bt] = exp.coefficients(eps);
        Expr w = exp.candidate(eps);
        EpsRecord rec;
        rec.eps = eps;
        double sum = 0.0;
        for (Complex t : exp.t_grid) {
            ScaledResidual r = discrete_residual_scaled(At, Bt, w, t, eps);
            double mag = std::abs(r.value);
            sum += mag;
            rec.max_residual = std::max(rec.max_residual, mag);
            rec.max_relative = std::max(rec.max_relative, r.relative());
        }
        rec.mean_residual = sum / static_cast<double>(exp.t_grid.size());
        fit.records.push_back(rec);
    }
    // order by decreasing |eps|, fit over the small-eps half, above the floor
    std::vector<double> lx, ly;
    std::size_t half_begin = fit.records.size() / 2;
    for (std::size_t k = half_begin; k < fit.records.size(); ++k) {
        const auto& rec = fit.records[k];
        if (rec.max_relative <= residual_floor(rec.eps)) {
            fit.residual_underflow = true;
            continue;
        }
        lx.push_back(std::log(std::abs(rec.eps)));
        ly.push_back(std::log(rec.max_residual));
    }
    if (lx.size() >= 2) {
        fit.order = fit_slope(lx, ly);
    } else {
        // usable prefix fallback: everything above the floor
        lx.clear();
        ly.clear();
        for (const auto& rec : fit.records) {
            if (rec.max_relative <= residual_floor(rec.eps)) continue;
            lx.push_back(std::log(std::abs(rec.eps)));
            ly.push_back(std::log(rec.max_residual));
        }
        fit.residual_underflow = true;
        if (lx.size() >= 2) fit.order = fit_slope(lx, ly);
    }
    return fit;
}

} // namespace dn

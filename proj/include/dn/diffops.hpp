#pragma once

#include <vector>

#include "dn/errors.hpp"
#include "dn/expr.hpp"

namespace dn {

/// Forward difference f(z+1) - f(z), as an exact tree transformation.
inline Expr delta(const Expr& f) { return f.shifted(Complex(1.0, 0.0)) - f; }

/// Second difference f(z+2) - 2 f(z+1) + f(z); equals delta(delta(f)) pointwise.
inline Expr delta2(const Expr& f) {
    return f.shifted(Complex(2.0, 0.0)) - Expr::constant(2.0) * f.shifted(Complex(1.0, 0.0)) + f;
}

/// Casoratian f1 * delta(f2) - f2 * delta(f1), the discrete Wronskian.
inline Expr casoratian(const Expr& f1, const Expr& f2) {
    return f1 * delta(f2) - f2 * delta(f1);
}

/// max over the grid of |f(z + period) - f(z)|. Zero within tolerance
/// certifies periodicity on the grid only, nothing more. The grid must avoid
/// singularities of f and of its shift; a non-finite sample throws.
inline double periodicity_defect(const Expr& f, Complex period, const std::vector<Complex>& grid) {
    if (period == Complex(0.0, 0.0)) return 0.0;
    double worst = 0.0;
    for (Complex z : grid) {
        Value a = f(z);
        Value b = f(z + period);
        if (!a.is_finite() || !b.is_finite())
            throw SingularGridPoint("periodicity_defect: grid point hits a singularity");
        worst = std::max(worst, std::abs(b.get() - a.get()));
    }
    return worst;
}

} // namespace dn

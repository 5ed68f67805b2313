#pragma once

#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dn/errors.hpp"
#include "dn/meromorphic.hpp"

namespace dn {

/// Seed for anything sampled (property tests, random parameter draws).
/// Grids themselves are deterministic lattices; DN_SEED only pins the rest.
inline std::uint64_t sampling_seed() {
    if (const char* s = std::getenv("DN_SEED")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(s, &end, 10);
        if (end && *end == '\0') return v;
    }
    return 0x5eed0001ull;
}

/// Deterministic lattice of `count` points in the box, skipping points that
/// come within `guard` of a declared singularity of any listed function at
/// any of the listed shifts (z + s is checked against each ledger).
/// An optional extra screen rejects points the caller cannot use.
inline std::vector<Complex> regular_grid(
    const Box& box, std::size_t count,
    const std::vector<const MeromorphicFunction*>& avoid = {},
    const std::vector<Complex>& shifts = {Complex(0.0, 0.0)}, double guard = 0.05,
    const std::function<bool(Complex)>& screen = {}) {
    for (int m = static_cast<int>(std::sqrt(static_cast<double>(count))) + 2;; m *= 2) {
        std::vector<Complex> out;
        out.reserve(count);
        for (int i = 0; i < m && out.size() < count; ++i) {
            for (int j = 0; j < m && out.size() < count; ++j) {
                Complex z(box.x0 + (box.x1 - box.x0) * (i + 0.5) / m,
                          box.y0 + (box.y1 - box.y0) * (j + 0.5) / m);
                bool ok = true;
                for (const auto* f : avoid) {
                    for (Complex s : shifts) {
                        if (f->ledger.distance_to_nearest(z + s) < guard) {
                            ok = false;
                            break;
                        }
                    }
                    if (!ok) break;
                }
                if (ok && screen && !screen(z)) ok = false;
                if (ok) out.push_back(z);
            }
        }
        if (out.size() >= count) return out;
        if (m > 4096) throw Error("regular_grid: could not place enough points");
    }
}

/// Uniformly spaced points on the segment [a, b].
inline std::vector<Complex> segment_grid(Complex a, Complex b, std::size_t count) {
    std::vector<Complex> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        double s = count == 1 ? 0.5 : static_cast<double>(k) / (count - 1);
        out.push_back(a + s * (b - a));
    }
    return out;
}

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw DegenerateSample("fit_slope: need >= 2 points");
    double xbar = 0.0, ybar = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        xbar += xs[k];
        ybar += ys[k];
    }
    xbar /= xs.size();
    ybar /= ys.size();
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        num += (xs[k] - xbar) * (ys[k] - ybar);
        den += (xs[k] - xbar) * (xs[k] - xbar);
    }
    if (den == 0.0) throw DegenerateSample("fit_slope: degenerate abscissae");
    return num / den;
}

/// 1 + max |f| over the grid; the scale residual/defect tolerances refer to.
inline double grid_scale(const Expr& f, const std::vector<Complex>& grid) {
    double m = 0.0;
    for (Complex z : grid) {
        Value v = f(z);
        if (v.is_finite()) m = std::max(m, std::abs(v.get()));
    }
    return 1.0 + m;
}

} // namespace dn

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dn/errors.hpp"
#include "dn/expr.hpp"
#include "dn/ledger.hpp"

namespace dn {

/// A closed-form expression paired with its declared singularity ledger.
struct MeromorphicFunction {
    Expr expr;
    SingularityLedger ledger;
    std::string label;

    MeromorphicFunction() = default;
    MeromorphicFunction(Expr e, SingularityLedger led = {}, std::string lab = {})
        : expr(std::move(e)), ledger(std::move(led)), label(std::move(lab)) {
        ledger.check_invariants();
    }

    Value operator()(Complex z) const { return expr(z); }

    /// 1/f: reciprocal expression, ledger kinds swapped.
    MeromorphicFunction reciprocal() const {
        return MeromorphicFunction(Expr::constant(1.0) / expr, ledger.reciprocal(),
                                   label.empty() ? "" : "1/(" + label + ")");
    }
};

/// Ledger poles with |location| < r, lattice families expanded, sorted by
/// modulus then argument.
inline std::vector<std::pair<Complex, int>> poles_in_disk(const MeromorphicFunction& f, double r) {
    if (r <= 0.0) throw Error("poles_in_disk: r must be positive");
    std::vector<std::pair<Complex, int>> out;
    for (const auto& rec : f.ledger.expand_in_disk(r))
        if (rec.kind == SingKind::pole) out.emplace_back(rec.location, rec.multiplicity);
    return out;
}

namespace detail {

/// Trapezoid approximation of (1/2pi i) * contour integral of f'/f over the
/// box boundary, with `n` intervals per edge.
inline Complex winding_raw(const Expr& f, const Expr& fprime, const Box& box, int n) {
    Complex sum(0.0, 0.0);
    for (int edge = 0; edge < 4; ++edge) {
        Complex a = box.corner(edge);
        Complex b = box.corner(edge + 1);
        Complex d = b - a;
        // trapezoid over s in [0,1]
        for (int j = 0; j <= n; ++j) {
            double s = static_cast<double>(j) / n;
            Complex z = a + s * d;
            Value fv = f(z);
            Value dv = fprime(z);
            Value q = dv / fv;
            if (!q.is_finite())
                throw NonIntegerWinding("non-finite sample of f'/f on the contour");
            double w = (j == 0 || j == n) ? 0.5 : 1.0;
            sum += w * q.get() * d / static_cast<double>(n);
        }
    }
    return sum / Complex(0.0, 2.0 * 3.14159265358979323846);
}

} // namespace detail

/// Zeros minus poles (with multiplicity) inside the box, via the winding
/// integral of f'/f over the boundary using the symbolic derivative.
/// Composite trapezoid per edge, 256 nodes initially, doubled until the value
/// stabilises within 0.05 or 4096 nodes are reached; the rounded integer is
/// rejected if the raw value strays more than 0.25 from it.
inline int argument_principle_count(const MeromorphicFunction& f, const Box& box) {
    for (const auto& rec : f.ledger.expand_in_box(box, /*pad=*/0.1)) {
        Complex z = rec.location;
        double dx = std::min(std::abs(z.real() - box.x0), std::abs(z.real() - box.x1));
        double dy = std::min(std::abs(z.imag() - box.y0), std::abs(z.imag() - box.y1));
        bool in_x = z.real() >= box.x0 - 1e-3 && z.real() <= box.x1 + 1e-3;
        bool in_y = z.imag() >= box.y0 - 1e-3 && z.imag() <= box.y1 + 1e-3;
        if ((dx < 1e-3 && in_y) || (dy < 1e-3 && in_x))
            throw NonIntegerWinding("declared singularity within 1e-3 of the box boundary");
    }
    Expr fprime = f.expr.derivative();
    Complex prev = detail::winding_raw(f.expr, fprime, box, 256);
    Complex cur = prev;
    for (int n = 512; n <= 4096; n *= 2) {
        cur = detail::winding_raw(f.expr, fprime, box, n);
        if (std::abs(cur - prev) < 0.05) break;
        prev = cur;
    }
    double raw = cur.real();
    long long rounded = std::llround(raw);
    if (std::abs(raw - static_cast<double>(rounded)) > 0.25 || std::abs(cur.imag()) > 0.25)
        throw NonIntegerWinding("winding value " + std::to_string(raw) +
                                " not close to an integer");
    return static_cast<int>(rounded);
}

/// One tile of a ledger validation run.
struct CellCheck {
    Box cell;
    int predicted = 0;
    int counted = 0;
    bool ok = false;
    bool multi_occupied = false; // more than one declared singularity in the tile
    std::string error;           // nonempty when the winding count failed
};

struct LedgerValidation {
    std::vector<CellCheck> cells;
    bool passed = false;
    std::size_t mismatch_count = 0;
};

namespace detail {

/// Grid lines at ~cell spacing, deterministically nudged off the declared
/// singularity coordinates so no tile boundary runs through one.
inline std::vector<double> safe_grid_lines(double lo, double hi, int n,
                                           const std::vector<double>& avoid, double guard) {
    std::vector<double> lines(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
        double nominal = lo + (hi - lo) * static_cast<double>(k) / n;
        int prefer = (k == 0) ? +1 : (k == n ? -1 : +1);
        double best = nominal;
        double best_dist = -1.0;
        bool placed = false;
        for (int step = 0; step <= 6 && !placed; ++step) {
            for (int sgn : {prefer, -prefer}) {
                double cand = nominal + sgn * step * guard;
                if (step == 0 && sgn != prefer) continue;
                double dist = std::numeric_limits<double>::infinity();
                for (double a : avoid) dist = std::min(dist, std::abs(cand - a));
                if (dist >= guard * 0.999) {
                    best = cand;
                    placed = true;
                    break;
                }
                if (dist > best_dist) {
                    best_dist = dist;
                    best = cand;
                }
            }
        }
        lines[static_cast<std::size_t>(k)] = best;
    }
    return lines;
}

} // namespace detail

/// Tiles the region into ~cell-sized tiles and compares the winding count of
/// each tile against the ledger's zeros-minus-poles prediction. Tile
/// boundaries are nudged away from declared singularities; tiles holding more
/// than one declared singularity are flagged (reported, not guessed).
inline LedgerValidation validate_ledger(const MeromorphicFunction& f, const Box& region,
                                        double cell) {
    if (cell <= 0.0) throw Error("validate_ledger: cell must be positive");
    int nx = std::max(1, static_cast<int>(std::llround((region.x1 - region.x0) / cell)));
    int ny = std::max(1, static_cast<int>(std::llround((region.y1 - region.y0) / cell)));
    double guard = std::min(0.05, std::min((region.x1 - region.x0) / nx,
                                           (region.y1 - region.y0) / ny) / 8.0);

    auto declared = f.ledger.expand_in_box(region, /*pad=*/cell);
    std::vector<double> xs, ys;
    xs.reserve(declared.size());
    ys.reserve(declared.size());
    for (const auto& r : declared) {
        xs.push_back(r.location.real());
        ys.push_back(r.location.imag());
    }
    auto xlines = detail::safe_grid_lines(region.x0, region.x1, nx, xs, guard);
    auto ylines = detail::safe_grid_lines(region.y0, region.y1, ny, ys, guard);

    LedgerValidation report;
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            CellCheck c;
            c.cell = Box{xlines[i], xlines[i + 1], ylines[j], ylines[j + 1]};
            int occupancy = 0;
            for (const auto& r : declared) {
                if (c.cell.contains(r.location)) {
                    ++occupancy;
                    c.predicted += (r.kind == SingKind::zero ? r.multiplicity : -r.multiplicity);
                }
            }
            c.multi_occupied = occupancy > 1;
            try {
                c.counted = argument_principle_count(f, c.cell);
                c.ok = c.counted == c.predicted;
            } catch (const NonIntegerWinding& e) {
                c.error = e.what();
                c.ok = false;
            }
            if (!c.ok) ++report.mismatch_count;
            report.cells.push_back(std::move(c));
        }
    }
    report.passed = report.mismatch_count == 0;
    return report;
}

} // namespace dn

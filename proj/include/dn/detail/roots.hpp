#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "dn/errors.hpp"
#include "dn/value.hpp"

namespace dn::detail {

/// Durand-Kerner roots of a polynomial with ascending coefficients.
/// Intended for the small (degree <= 4) numerator polynomials the catalog
/// turns into zero lattices.
inline std::vector<Complex> poly_roots(std::vector<Complex> coeffs) {
    while (!coeffs.empty() && std::abs(coeffs.back()) == 0.0) coeffs.pop_back();
    if (coeffs.size() < 2) return {};
    std::size_t deg = coeffs.size() - 1;
    Complex lead = coeffs.back();
    for (auto& c : coeffs) c /= lead;

    auto eval = [&](Complex u) {
        Complex acc(0.0, 0.0);
        for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * u + coeffs[k];
        return acc;
    };

    std::vector<Complex> roots(deg);
    Complex seed(0.4, 0.9);
    Complex cur(1.0, 0.0);
    for (auto& r : roots) {
        cur *= seed;
        r = cur;
    }
    for (int iter = 0; iter < 300; ++iter) {
        double moved = 0.0;
        for (std::size_t i = 0; i < deg; ++i) {
            Complex denom(1.0, 0.0);
            for (std::size_t j = 0; j < deg; ++j)
                if (j != i) denom *= roots[i] - roots[j];
            if (std::abs(denom) == 0.0) continue;
            Complex delta = eval(roots[i]) / denom;
            roots[i] -= delta;
            moved = std::max(moved, std::abs(delta));
        }
        if (moved < 1e-14) break;
    }
    return roots;
}

/// Cluster nearly-equal roots into (value, multiplicity) pairs.
inline std::vector<std::pair<Complex, int>> cluster_roots(const std::vector<Complex>& roots,
                                                          double tol = 1e-7) {
    std::vector<std::pair<Complex, int>> out;
    for (Complex r : roots) {
        bool merged = false;
        for (auto& [v, m] : out) {
            if (std::abs(v - r) < tol) {
                v = (v * static_cast<double>(m) + r) / static_cast<double>(m + 1);
                ++m;
                merged = true;
                break;
            }
        }
        if (!merged) out.emplace_back(r, 1);
    }
    return out;
}

/// All solutions of z = a * exp(2 pi i m z) with |z| < R.
///
/// Every solution obeys |z| = |a| e^{-2 pi m Im z}, confining the set to a
/// horizontal strip; Newton from a dense deterministic seed lattice over that
/// strip finds them all.
inline std::vector<Complex> exponential_fixed_points(Complex a, int m, double R) {
    if (a == Complex(0.0, 0.0) || m <= 0) throw Error("exponential_fixed_points: bad parameters");
    const double two_pi_m = 2.0 * 3.14159265358979323846 * m;
    double y_min = -std::log(R / std::abs(a)) / two_pi_m - 0.1;
    double y_max = std::max(1.0, std::abs(a)) + 0.1;
    double dx = 0.2 / m;
    double dy = 0.1;

    auto F = [&](Complex z) { return z - a * std::exp(Complex(0.0, two_pi_m) * z); };
    auto Fp = [&](Complex z) {
        return Complex(1.0, 0.0) - a * Complex(0.0, two_pi_m) * std::exp(Complex(0.0, two_pi_m) * z);
    };

    std::vector<Complex> found;
    for (double x = -R - 0.3; x <= R + 0.3; x += dx) {
        for (double y = y_min; y <= y_max; y += dy) {
            Complex z(x, y);
            bool ok = false;
            for (int it = 0; it < 40; ++it) {
                Complex f = F(z);
                Complex d = Fp(z);
                if (std::abs(d) < 1e-14) break;
                Complex step = f / d;
                z -= step;
                if (std::abs(step) < 1e-13) {
                    ok = std::abs(F(z)) < 1e-10 * (1.0 + std::abs(z));
                    break;
                }
                if (std::abs(z) > 4.0 * R + 10.0) break;
            }
            if (!ok || std::abs(z) >= R) continue;
            bool dup = false;
            for (Complex w : found)
                if (std::abs(w - z) < 1e-7) {
                    dup = true;
                    break;
                }
            if (!dup) found.push_back(z);
        }
    }
    std::sort(found.begin(), found.end(), [](Complex p, Complex q) {
        if (p.real() != q.real()) return p.real() < q.real();
        return p.imag() < q.imag();
    });
    return found;
}

} // namespace dn::detail

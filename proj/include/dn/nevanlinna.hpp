#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "dn/errors.hpp"
#include "dn/grid.hpp"
#include "dn/meromorphic.hpp"

namespace dn {

/// Proximity/counting/characteristic triple at one radius.
struct CharacteristicEstimate {
    double r = 0.0;
    double m = 0.0;          // circle average of log+|f|
    double N = 0.0;          // integrated pole counting
    double T = 0.0;          // m + N, stored as computed
    double quad_error = 0.0; // Richardson-style estimate for m
    int nodes_used = 0;
};

/// Pole counts at one radius, with the odd-multiplicity variants.
struct CountingBreakdown {
    int n = 0;        // with multiplicity
    int n_bar = 0;    // distinct poles
    int n_odd = 0;    // full multiplicity, odd-multiplicity poles only
    int n_bar_odd = 0;
    double N = 0.0;
    double N_bar = 0.0;
    double N_odd = 0.0;
    double N_bar_odd = 0.0;
};

namespace detail {

inline double kahan_sum(const std::vector<double>& xs) {
    double s = 0.0, c = 0.0;
    for (double x : xs) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

/// One trapezoid pass of (1/2pi) Int log+|f(r e^{i th})| dth with the
/// node-shift guard around declared on-circle singularities.
inline double proximity_pass(const MeromorphicFunction& f, double r, int nodes,
                             const std::vector<Complex>& near_circle) {
    const double two_pi = 2.0 * 3.14159265358979323846;
    double h = two_pi / nodes;
    std::vector<double> samples;
    samples.reserve(nodes);
    for (int j = 0; j < nodes; ++j) {
        double theta = h * j;
        Complex z = std::polar(r, theta);
        for (Complex s : near_circle) {
            if (std::abs(z - s) < 1e-6) {
                theta += 0.5 * h;
                z = std::polar(r, theta);
                break;
            }
        }
        Value v = f(z);
        if (!v.is_finite()) {
            // exact hit on an undeclared pole: nudge once more
            theta += 0.25 * h;
            v = f(std::polar(r, theta));
        }
        double mag = v.is_finite() ? std::abs(v.get()) : 0.0;
        samples.push_back(log_plus(mag));
    }
    return kahan_sum(samples) / nodes;
}

} // namespace detail

/// Trapezoid value of m(r, f) with `nodes` samples plus the error estimate
/// |value(nodes) - value(nodes/2)|.
inline std::pair<double, double> proximity_m(const MeromorphicFunction& f, double r, int nodes) {
    if (r <= 0.0) throw Error("proximity_m: r must be positive");
    if (nodes < 8) throw Error("proximity_m: need at least 8 nodes");
    std::vector<Complex> near_circle;
    for (const auto& rec : f.ledger.expand_in_disk(r + 1e-3))
        if (std::abs(std::abs(rec.location) - r) < 1e-5) near_circle.push_back(rec.location);
    double v = detail::proximity_pass(f, r, nodes, near_circle);
    double v_half = detail::proximity_pass(f, r, nodes / 2, near_circle);
    return {v, std::abs(v - v_half)};
}

namespace detail {

/// Shared worker: counting over the records of one kind.
inline CountingBreakdown counting_over(const std::vector<SingularityRecord>& records, double r) {
    CountingBreakdown out;
    int n0 = 0, n0_bar = 0, n0_odd = 0, n0_bar_odd = 0;
    std::vector<double> terms, terms_bar, terms_odd, terms_bar_odd;
    for (const auto& rec : records) {
        double rho = std::abs(rec.location);
        bool odd = (rec.multiplicity % 2) == 1;
        if (rho <= 1e-9) {
            n0 = rec.multiplicity;
            n0_bar = 1;
            n0_odd = odd ? rec.multiplicity : 0;
            n0_bar_odd = odd ? 1 : 0;
            continue;
        }
        if (rho >= r) continue;
        double log_term = std::log(r / rho);
        out.n += rec.multiplicity;
        out.n_bar += 1;
        terms.push_back(rec.multiplicity * log_term);
        terms_bar.push_back(log_term);
        if (odd) {
            out.n_odd += rec.multiplicity;
            out.n_bar_odd += 1;
            terms_odd.push_back(rec.multiplicity * log_term);
            terms_bar_odd.push_back(log_term);
        }
    }
    if (n0 > 0 && r <= 1.0)
        throw OriginPoleSmallRadius("counting: pole at the origin needs r > 1");
    double logr = std::log(r);
    out.n += n0;
    out.n_bar += n0_bar;
    out.n_odd += n0_odd;
    out.n_bar_odd += n0_bar_odd;
    out.N = n0 * logr + kahan_sum(terms);
    out.N_bar = n0_bar * logr + kahan_sum(terms_bar);
    out.N_odd = n0_odd * logr + kahan_sum(terms_odd);
    out.N_bar_odd = n0_bar_odd * logr + kahan_sum(terms_bar_odd);
    return out;
}

inline std::vector<SingularityRecord> records_of_kind(const MeromorphicFunction& f, double r,
                                                      SingKind kind, const char* who) {
    for (const auto& rec : f.ledger.expand_in_disk(r + 1e-3))
        if (rec.kind == kind && std::abs(std::abs(rec.location) - r) <= 1e-9)
            throw PoleOnCircle(std::string(who) + ": declared singularity on |z| = r");
    std::vector<SingularityRecord> out;
    for (const auto& rec : f.ledger.expand_in_disk(r))
        if (rec.kind == kind) out.push_back(rec);
    return out;
}

} // namespace detail

/// Pole counting from the declared ledger: n-values and the integrated
/// N(r) = n(0) log r + sum over 0<|z_k|<r of mult * log(r/|z_k|), summed
/// ascending in |z_k| with compensated summation.
inline CountingBreakdown counting(const MeromorphicFunction& f, double r) {
    if (r <= 0.0) throw Error("counting: r must be positive");
    return detail::counting_over(detail::records_of_kind(f, r, SingKind::pole, "counting"), r);
}

/// N_odd(r, f) + N_odd(r, 1/f): odd-multiplicity poles plus odd-multiplicity
/// zeros. Requires the ledger to be complete out to r.
inline double N_O(const MeromorphicFunction& f, double r) {
    if (r > f.ledger.complete_radius)
        throw IncompleteLedger("N_O: ledger not complete out to r");
    auto poles = detail::counting_over(detail::records_of_kind(f, r, SingKind::pole, "N_O"), r);
    auto zeros = detail::counting_over(detail::records_of_kind(f, r, SingKind::zero, "N_O"), r);
    return poles.N_odd + zeros.N_odd;
}

/// Barred variant: odd-multiplicity poles and zeros counted once each.
inline double N_O_bar(const MeromorphicFunction& f, double r) {
    if (r > f.ledger.complete_radius)
        throw IncompleteLedger("N_O_bar: ledger not complete out to r");
    auto poles = detail::counting_over(detail::records_of_kind(f, r, SingKind::pole, "N_O_bar"), r);
    auto zeros = detail::counting_over(detail::records_of_kind(f, r, SingKind::zero, "N_O_bar"), r);
    return poles.N_bar_odd + zeros.N_bar_odd;
}

/// T(r, f) = m(r, f) + N(r, f).
inline CharacteristicEstimate characteristic_T(const MeromorphicFunction& f, double r,
                                               int nodes = 2048) {
    CharacteristicEstimate est;
    est.r = r;
    auto [m, err] = proximity_m(f, r, nodes);
    est.m = m;
    est.quad_error = err;
    est.nodes_used = nodes;
    est.N = counting(f, r).N;
    est.T = est.m + est.N;
    return est;
}

struct GrowthRatioPoint {
    double r = 0.0;
    double T1 = 0.0;
    double T2 = 0.0;
    double ratio = 0.0;
};

/// Trend analysis of T(r,f1)/T(r,f2) along a radius schedule. drift is the
/// spread of the ratio over the top half of the schedule.
struct GrowthRatioReport {
    std::vector<GrowthRatioPoint> points;
    double final_ratio = 0.0;
    double drift = 0.0;
};

inline GrowthRatioReport growth_ratio(const MeromorphicFunction& f1,
                                      const MeromorphicFunction& f2,
                                      const std::vector<double>& radii, int nodes = 2048) {
    if (radii.empty()) throw Error("growth_ratio: empty radius schedule");
    GrowthRatioReport rep;
    for (double r : radii) {
        auto e1 = characteristic_T(f1, r, nodes);
        auto e2 = characteristic_T(f2, r, nodes);
        if (e2.T <= e2.quad_error)
            throw ZeroCharacteristic("growth_ratio: T(r,f2) below quadrature noise");
        rep.points.push_back({r, e1.T, e2.T, e1.T / e2.T});
    }
    rep.final_ratio = rep.points.back().ratio;
    std::size_t half = rep.points.size() / 2;
    double lo = rep.points.back().ratio, hi = lo;
    for (std::size_t k = half; k < rep.points.size(); ++k) {
        lo = std::min(lo, rep.points[k].ratio);
        hi = std::max(hi, rep.points[k].ratio);
    }
    rep.drift = hi - lo;
    return rep;
}

} // namespace dn

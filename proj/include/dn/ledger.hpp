#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "dn/errors.hpp"
#include "dn/value.hpp"

namespace dn {

/// Axis-aligned rectangle in the plane.
struct Box {
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;

    bool contains(Complex z) const {
        return z.real() > x0 && z.real() < x1 && z.imag() > y0 && z.imag() < y1;
    }
    double circumradius() const {
        double mx = std::max(std::abs(x0), std::abs(x1));
        double my = std::max(std::abs(y0), std::abs(y1));
        return std::hypot(mx, my);
    }
    Complex corner(int k) const {
        switch (k & 3) {
            case 0: return {x0, y0};
            case 1: return {x1, y0};
            case 2: return {x1, y1};
            default: return {x0, y1};
        }
    }
};

enum class SingKind { pole, zero };

inline const char* to_cstr(SingKind k) { return k == SingKind::pole ? "pole" : "zero"; }

/// One declared zero or pole.
struct SingularityRecord {
    Complex location{};
    int multiplicity = 1;
    SingKind kind = SingKind::pole;
};

/// Infinite family base + k*step, k integer (e.g. "simple poles at all integers").
struct LatticeFamily {
    Complex base{};
    Complex step{1.0, 0.0};
    int multiplicity = 1;
    SingKind kind = SingKind::pole;
};

/// Expansion never walks past this modulus, far beyond any desk-scale radius.
inline constexpr double kLatticeExpansionCap = 1e6;

/// Declared zeros/poles of a meromorphic function. Ledgers are analytical
/// knowledge attached by the caller; the argument-principle counter in
/// meromorphic.hpp validates them but never discovers entries.
struct SingularityLedger {
    std::vector<SingularityRecord> points;
    std::vector<LatticeFamily> lattices;

    /// Within |z| <= complete_radius every zero and pole is declared.
    /// 0 marks a derived, not-yet-validated ledger.
    double complete_radius = kLatticeExpansionCap;

    bool empty() const { return points.empty() && lattices.empty(); }

    /// All records with |location| < r, lattice families expanded.
    std::vector<SingularityRecord> expand_in_disk(double r) const {
        double cap = std::min(r, kLatticeExpansionCap);
        std::vector<SingularityRecord> out;
        for (const auto& p : points)
            if (std::abs(p.location) < cap) out.push_back(p);
        for (const auto& lat : lattices) {
            double step = std::abs(lat.step);
            if (step == 0.0) throw Error("lattice step must be nonzero");
            long long kmax = static_cast<long long>((cap + std::abs(lat.base)) / step) + 1;
            for (long long k = -kmax; k <= kmax; ++k) {
                Complex loc = lat.base + static_cast<double>(k) * lat.step;
                if (std::abs(loc) < cap)
                    out.push_back({loc, lat.multiplicity, lat.kind});
            }
        }
        std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
            double ma = std::abs(a.location), mb = std::abs(b.location);
            if (ma != mb) return ma < mb;
            double aa = std::arg(a.location), ab = std::arg(b.location);
            if (aa != ab) return aa < ab;
            return a.kind == SingKind::pole && b.kind == SingKind::zero;
        });
        return out;
    }

    /// All records inside the (padded) box.
    std::vector<SingularityRecord> expand_in_box(const Box& box, double pad = 0.0) const {
        Box padded{box.x0 - pad, box.x1 + pad, box.y0 - pad, box.y1 + pad};
        auto all = expand_in_disk(padded.circumradius() + 1.0);
        std::vector<SingularityRecord> out;
        for (const auto& r : all) {
            Complex z = r.location;
            if (z.real() >= padded.x0 && z.real() <= padded.x1 && z.imag() >= padded.y0 &&
                z.imag() <= padded.y1)
                out.push_back(r);
        }
        return out;
    }

    /// Distance from z to the nearest declared singularity (any kind) within
    /// a disk that generously covers z.
    double distance_to_nearest(Complex z) const {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& r : expand_in_disk(std::abs(z) + 2.0))
            best = std::min(best, std::abs(z - r.location));
        return best;
    }

    /// Duplicate-record invariant: after expansion, no two entries of the same
    /// kind share a location.
    void check_invariants(double radius = 12.0) const {
        for (const auto& p : points)
            if (p.multiplicity < 1) throw Error("ledger multiplicity must be >= 1");
        for (const auto& l : lattices)
            if (l.multiplicity < 1) throw Error("ledger multiplicity must be >= 1");
        auto all = expand_in_disk(radius);
        for (std::size_t i = 0; i + 1 < all.size(); ++i) {
            if (all[i].kind == all[i + 1].kind &&
                std::abs(all[i].location - all[i + 1].location) < 1e-9)
                throw Error("ledger declares the same " + std::string(to_cstr(all[i].kind)) +
                            " twice near |z|=" + std::to_string(std::abs(all[i].location)));
        }
    }

    /// Swap zero/pole kinds (the ledger of 1/f).
    SingularityLedger reciprocal() const {
        SingularityLedger out = *this;
        for (auto& p : out.points) p.kind = p.kind == SingKind::pole ? SingKind::zero : SingKind::pole;
        for (auto& l : out.lattices) l.kind = l.kind == SingKind::pole ? SingKind::zero : SingKind::pole;
        return out;
    }
};

inline void to_json(nlohmann::json& j, const SingularityLedger& led) {
    j = nlohmann::json::object();
    auto& pts = j["points"] = nlohmann::json::array();
    for (const auto& p : led.points)
        pts.push_back({{"x", p.location.real()},
                       {"y", p.location.imag()},
                       {"multiplicity", p.multiplicity},
                       {"kind", to_cstr(p.kind)}});
    auto& lats = j["lattices"] = nlohmann::json::array();
    for (const auto& l : led.lattices)
        lats.push_back({{"base_x", l.base.real()},
                        {"base_y", l.base.imag()},
                        {"step_x", l.step.real()},
                        {"step_y", l.step.imag()},
                        {"multiplicity", l.multiplicity},
                        {"kind", to_cstr(l.kind)}});
    j["complete_radius"] = led.complete_radius;
}

inline SingKind kind_from_string(const std::string& s) {
    if (s == "pole") return SingKind::pole;
    if (s == "zero") return SingKind::zero;
    throw ConfigError("unknown singularity kind '" + s + "'");
}

inline void from_json(const nlohmann::json& j, SingularityLedger& led) {
    led = SingularityLedger{};
    if (j.contains("points"))
        for (const auto& p : j.at("points"))
            led.points.push_back({Complex(p.at("x").get<double>(), p.at("y").get<double>()),
                                  p.at("multiplicity").get<int>(),
                                  kind_from_string(p.at("kind").get<std::string>())});
    if (j.contains("lattices"))
        for (const auto& l : j.at("lattices"))
            led.lattices.push_back(
                {Complex(l.at("base_x").get<double>(), l.at("base_y").get<double>()),
                 Complex(l.at("step_x").get<double>(), l.at("step_y").get<double>()),
                 l.at("multiplicity").get<int>(),
                 kind_from_string(l.at("kind").get<std::string>())});
    led.complete_radius = j.value("complete_radius", kLatticeExpansionCap);
}

} // namespace dn

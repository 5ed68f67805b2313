#include <doctest.h>

#include <json.hpp>

#include "dn/meromorphic.hpp"
#include "test_util.hpp"

using namespace dn;
using dntest::kPi;

namespace {

Expr zvar() { return Expr::var(); }

Expr f_b_expr(Complex b) {
    Expr z = zvar();
    Expr epi = exp(Expr::constant(Complex(0.0, kPi)) * z);
    Expr e2pi = exp(Expr::constant(Complex(0.0, 2.0 * kPi)) * z);
    return (Expr::constant(1.0) + Expr::constant(b) * epi - e2pi) / (e2pi - Expr::constant(1.0));
}

// Zero lattices of f_b: numerator roots in u = e^{pi i z} are
// u = (b +- sqrt(b^2+4))/2, each giving z = -i log(u)/pi + 2k.
SingularityLedger f_b_ledger(Complex b) {
    SingularityLedger led;
    led.lattices.push_back({Complex(0.0, 0.0), Complex(1.0, 0.0), 1, SingKind::pole});
    Complex disc = std::sqrt(b * b + 4.0);
    for (Complex u : {(b + disc) / 2.0, (b - disc) / 2.0}) {
        Complex base = std::log(u) / Complex(0.0, kPi);
        led.lattices.push_back({base, Complex(2.0, 0.0), 1, SingKind::zero});
    }
    return led;
}

MeromorphicFunction f_b(Complex b) {
    return MeromorphicFunction(f_b_expr(b), f_b_ledger(b), "f_b");
}

} // namespace

TEST_CASE("meromorphic: poles_in_disk") {
    SUBCASE("f_b with r = 2.5 lists 0, +-1, +-2, all simple") {
        auto ps = poles_in_disk(f_b(Complex(1.0, 0.0)), 2.5);
        REQUIRE(ps.size() == 5);
        CHECK(std::abs(ps[0].first) < 1e-12);
        for (const auto& [loc, mult] : ps) {
            CHECK(mult == 1);
            CHECK(std::abs(loc.imag()) < 1e-12);
            CHECK(std::abs(loc.real() - std::round(loc.real())) < 1e-12);
        }
        CHECK(std::abs(ps[4].first.real()) == doctest::Approx(2.0));
    }

    SUBCASE("entire function has no poles at any radius") {
        SingularityLedger led;
        led.lattices.push_back({Complex(0.0, 0.0), Complex(kPi, 0.0), 1, SingKind::zero});
        MeromorphicFunction s(sin(zvar()), led, "sin");
        CHECK(poles_in_disk(s, 100.0).empty());
    }

    SUBCASE("double pole at the origin") {
        SingularityLedger led;
        led.points.push_back({Complex(0.0, 0.0), 2, SingKind::pole});
        MeromorphicFunction f(pow(zvar(), -2), led, "1/z^2");
        auto ps = poles_in_disk(f, 1.0);
        REQUIRE(ps.size() == 1);
        CHECK(ps[0].second == 2);
    }

    SUBCASE("monotone in r") {
        auto f = f_b(Complex(2.0, 0.0));
        auto prev = poles_in_disk(f, 0.5);
        for (double r : {1.5, 2.5, 3.5, 5.5, 8.5}) {
            auto cur = poles_in_disk(f, r);
            CHECK(cur.size() >= prev.size());
            for (const auto& p : prev) {
                bool found = false;
                for (const auto& q : cur)
                    if (std::abs(p.first - q.first) < 1e-12 && p.second == q.second) found = true;
                CHECK(found);
            }
            prev = cur;
        }
    }
}

TEST_CASE("meromorphic: argument principle counter") {
    SUBCASE("double zero of z^2") {
        SingularityLedger led;
        led.points.push_back({Complex(0.0, 0.0), 2, SingKind::zero});
        MeromorphicFunction f(pow(zvar(), 2), led, "z^2");
        CHECK(argument_principle_count(f, Box{-1, 1, -1, 1}) == 2);
    }

    SUBCASE("f_b near the origin") {
        auto f = f_b(Complex(1.0, 0.0));
        // Simple pole at 0 (denominator e^{2 pi i z}-1 ~ 2 pi i z, numerator 1).
        CHECK(argument_principle_count(f, Box{-0.1, 0.1, -0.1, 0.1}) == -1);
        // The wider box also contains the zero at about -0.1532i, so the net
        // winding is zero there.
        CHECK(argument_principle_count(f, Box{-0.4, 0.4, -0.4, 0.4}) == 0);
    }

    SUBCASE("simple zero of sin at pi") {
        SingularityLedger led;
        led.lattices.push_back({Complex(0.0, 0.0), Complex(kPi, 0.0), 1, SingKind::zero});
        MeromorphicFunction s(sin(zvar()), led, "sin");
        CHECK(argument_principle_count(s, Box{2, 4, -1, 1}) == 1);
    }

    SUBCASE("declared singularity on the boundary is rejected") {
        auto f = f_b(Complex(1.0, 0.0));
        CHECK_THROWS_AS(argument_principle_count(f, Box{-1.0, 1.0, -0.5, 0.5}),
                        NonIntegerWinding);
    }
}

TEST_CASE("meromorphic: ledger validation") {
    SUBCASE("f_b passes on [-2.5,2.5]^2 with cell 0.9") {
        auto rep = validate_ledger(f_b(Complex(1.0, 0.0)), Box{-2.5, 2.5, -2.5, 2.5}, 0.9);
        CHECK(rep.passed);
        CHECK(rep.mismatch_count == 0);
    }

    SUBCASE("a constant has no singularities anywhere") {
        MeromorphicFunction c(Expr::constant(2.0), {}, "2");
        auto rep = validate_ledger(c, Box{-2, 2, -2, 2}, 0.8);
        CHECK(rep.passed);
        for (const auto& cell : rep.cells) {
            CHECK(cell.predicted == 0);
            CHECK(cell.counted == 0);
        }
    }

    SUBCASE("corrupted multiplicity at z = 0 is localised") {
        SingularityLedger bad = f_b_ledger(Complex(1.0, 0.0));
        bad.lattices[0].multiplicity = 2; // claim double poles on the integer lattice
        MeromorphicFunction f(f_b_expr(Complex(1.0, 0.0)), bad, "f_b corrupted");
        auto rep = validate_ledger(f, Box{-1.6, 1.6, -1.6, 1.6}, 0.9);
        CHECK_FALSE(rep.passed);
        bool origin_cell_flagged = false;
        for (const auto& cell : rep.cells)
            if (cell.cell.contains(Complex(0.0, 0.0)) && !cell.ok) origin_cell_flagged = true;
        CHECK(origin_cell_flagged);
    }
}

TEST_CASE("meromorphic: ledger invariants and serialisation") {
    SUBCASE("duplicate records of one kind are rejected") {
        SingularityLedger led;
        led.points.push_back({Complex(1.0, 0.0), 1, SingKind::pole});
        led.points.push_back({Complex(1.0, 0.0), 2, SingKind::pole});
        CHECK_THROWS_AS(MeromorphicFunction(zvar(), led, "dup"), Error);
    }

    SUBCASE("multiplicities below 1 are rejected") {
        SingularityLedger led;
        led.points.push_back({Complex(1.0, 0.0), 0, SingKind::pole});
        CHECK_THROWS_AS(MeromorphicFunction(zvar(), led, "bad"), Error);
    }

    SUBCASE("a pole and a zero may share nothing but still both be declared") {
        SingularityLedger led;
        led.points.push_back({Complex(1.0, 0.0), 1, SingKind::pole});
        led.points.push_back({Complex(-1.0, 0.0), 1, SingKind::zero});
        CHECK_NOTHROW(MeromorphicFunction(
            (zvar() + Expr::constant(1.0)) / (zvar() - Expr::constant(1.0)), led, "ok"));
    }

    SUBCASE("JSON round trip") {
        SingularityLedger led = f_b_ledger(Complex(2.0, 0.0));
        led.points.push_back({Complex(0.5, -0.25), 3, SingKind::zero});
        led.complete_radius = 42.0;
        nlohmann::json j = led;
        SingularityLedger back = j.get<SingularityLedger>();
        CHECK(back.points.size() == led.points.size());
        CHECK(back.lattices.size() == led.lattices.size());
        CHECK(back.complete_radius == 42.0);
        CHECK(std::abs(back.lattices[1].base - led.lattices[1].base) < 1e-15);
        CHECK(back.points[0].kind == SingKind::zero);
    }

    SUBCASE("reciprocal swaps kinds") {
        auto f = f_b(Complex(1.0, 0.0));
        auto g = f.reciprocal();
        CHECK(g.ledger.lattices[0].kind == SingKind::zero);
        CHECK(g.ledger.lattices[1].kind == SingKind::pole);
        Complex z0(0.37, 0.21);
        CHECK(std::abs(g(z0).get() - 1.0 / f(z0).get()) < 1e-12);
    }
}

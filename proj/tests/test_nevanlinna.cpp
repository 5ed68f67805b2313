#include <doctest.h>

#include "dn/catalog.hpp"
#include "dn/nevanlinna.hpp"
#include "test_util.hpp"

using namespace dn;
using dntest::kPi;

namespace {

/// Independent midpoint-rule oracle for m(r, f) with a plain callable.
template <typename F>
double proximity_oracle(F&& f, double r, int nodes = 1 << 15) {
    double acc = 0.0;
    for (int j = 0; j < nodes; ++j) {
        double theta = 2.0 * kPi * (j + 0.5) / nodes;
        Complex z = std::polar(r, theta);
        double mag = std::abs(f(z));
        if (std::isfinite(mag) && mag > 1.0) acc += std::log(mag);
    }
    return acc / nodes;
}

} // namespace

TEST_CASE("nevanlinna: log_plus") {
    CHECK(log_plus(std::exp(1.0)) == doctest::Approx(1.0));
    CHECK(log_plus(0.5) == 0.0);
    CHECK(log_plus(0.0) == 0.0);
    CHECK(log_plus(1.0) == 0.0);
}

TEST_CASE("nevanlinna: proximity function") {
    SUBCASE("constant 2 gives log 2 at any radius and node count") {
        MeromorphicFunction c(Expr::constant(2.0), {}, "2");
        for (double r : {0.5, 3.0, 25.0}) {
            auto [m, err] = proximity_m(c, r, 2048);
            CHECK(m == doctest::Approx(std::log(2.0)).epsilon(1e-12));
            CHECK(err <= 1e-12);
        }
    }

    SUBCASE("m(20, e^z) is r/pi within 2 percent") {
        MeromorphicFunction f(exp(Expr::var()), {}, "exp");
        auto [m, err] = proximity_m(f, 20.0, 2048);
        double classical = 20.0 / kPi;
        CHECK(std::abs(m - classical) <= 0.02 * classical);
        double oracle = proximity_oracle([](Complex z) { return std::exp(z); }, 20.0);
        CHECK(std::abs(m - oracle) <= 1e-3);
    }

    SUBCASE("m(20, sin z) matches the quadrature oracle; asymptote 2r/pi is ~5% high") {
        SingularityLedger led;
        led.lattices.push_back({Complex(0.0, 0.0), Complex(kPi, 0.0), 1, SingKind::zero});
        MeromorphicFunction f(sin(Expr::var()), led, "sin");
        auto [m, err] = proximity_m(f, 20.0, 2048);
        double oracle = proximity_oracle([](Complex z) { return std::sin(z); }, 20.0);
        CHECK(std::abs(m - oracle) <= 2e-3);
        double asym = 2.0 * 20.0 / kPi;
        CHECK(std::abs(m - asym) <= 0.06 * asym);
        CHECK(std::abs(m - asym) >= 0.04 * asym); // the log 2 deficit is real
    }

    SUBCASE("doubling nodes moves m by at most the reported error estimate") {
        auto fb = catalog_get("ex2_2").solutions[0];
        MeromorphicFunction zoo[] = {fb, MeromorphicFunction(exp(Expr::var()), {}, "exp"),
                                     catalog_get("ex2_1").solutions[0]};
        for (const auto& f : zoo) {
            for (double r : {4.5, 10.5}) {
                auto [m1, e1] = proximity_m(f, r, 1024);
                auto [m2, e2] = proximity_m(f, r, 2048);
                CHECK(std::abs(m2 - m1) <= e1 + 1e-12);
            }
        }
    }
}

TEST_CASE("nevanlinna: counting functions") {
    auto fb = catalog_get("ex2_2").solutions[0];

    SUBCASE("a pole sitting on the circle is rejected") {
        CHECK_THROWS_AS(counting(fb, 10.0), PoleOnCircle);
    }

    SUBCASE("f_b at r = 10.5 against the direct summation oracle") {
        auto c = counting(fb, 10.5);
        CHECK(c.n == 21);
        CHECK(c.n_bar == 21);
        CHECK(c.n_odd == 21);
        CHECK(c.n_bar_odd == 21);
        double oracle = std::log(10.5);
        for (int k = 1; k <= 10; ++k) oracle += 2.0 * std::log(10.5 / k);
        CHECK(c.N == doctest::Approx(oracle).epsilon(1e-12));
        CHECK(c.N_bar == doctest::Approx(oracle).epsilon(1e-12));
    }

    SUBCASE("double pole: excluded from the odd counts") {
        SingularityLedger led;
        led.points.push_back({Complex(2.0, 0.0), 2, SingKind::pole});
        MeromorphicFunction f(pow(Expr::var() - Expr::constant(2.0), -2), led, "f");
        auto c = counting(f, 4.0);
        CHECK(c.n == 2);
        CHECK(c.n_bar == 1);
        CHECK(c.n_odd == 0);
        CHECK(c.n_bar_odd == 0);
        CHECK(c.N == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-14));
        CHECK(c.N_odd == 0.0);
    }

    SUBCASE("entire functions count nothing") {
        auto s = catalog_get("ex2_1").solutions[0];
        auto c = counting(s, 7.5);
        CHECK(c.n == 0);
        CHECK(c.N == 0.0);
    }

    SUBCASE("origin pole demands r > 1") {
        CHECK_THROWS_AS(counting(fb, 0.5), OriginPoleSmallRadius);
    }

    SUBCASE("N and its variants are nondecreasing in r") {
        double prevN = 0.0, prevNb = 0.0, prevNo = 0.0;
        for (int k = 0; k < 20; ++k) {
            double r = 1.45 + 0.9 * k;
            auto c = counting(fb, r);
            CHECK(c.N >= prevN - 1e-12);
            CHECK(c.N_bar >= prevNb - 1e-12);
            CHECK(c.N_odd >= prevNo - 1e-12);
            prevN = c.N;
            prevNb = c.N_bar;
            prevNo = c.N_odd;
        }
    }

    SUBCASE("fitted slope of N(r, f_b) over [20, 100] is 2 within 0.1") {
        std::vector<double> rs, Ns;
        for (double r = 20.5; r <= 100.0; r += 5.0) {
            rs.push_back(r);
            Ns.push_back(counting(fb, r).N);
        }
        double slope = fit_slope(rs, Ns);
        CHECK(std::abs(slope - 2.0) <= 0.1);
    }
}

TEST_CASE("nevanlinna: odd-multiplicity invariants") {
    SUBCASE("the G-function of the h = z family counts 2 log 5 at r = 5") {
        auto e = catalog_get("ex5_1");
        const auto& G = e.extras.at("G(f1)");
        // odd entries are the order-3 pole at 0 and the simple pole at -1
        double expect = 2.0 * std::log(5.0);
        CHECK(N_O_bar(G, 5.0) == doctest::Approx(expect).epsilon(1e-12));
        // with multiplicity the order-3 pole counts three times
        CHECK(N_O(G, 5.0) == doctest::Approx(3.0 * std::log(5.0) + std::log(5.0)).epsilon(1e-12));
    }

    SUBCASE("even-only ledgers give N_O identically zero") {
        SingularityLedger led;
        led.points.push_back({Complex(1.0, 0.5), 2, SingKind::pole});
        led.points.push_back({Complex(-0.5, 0.0), 4, SingKind::zero});
        MeromorphicFunction f(Expr::constant(1.0), led, "even");
        for (double r : {2.0, 5.0, 8.0}) {
            CHECK(N_O(f, r) == 0.0);
            CHECK(N_O_bar(f, r) == 0.0);
        }
    }

    SUBCASE("G of the b-family has no zeros or poles at all") {
        auto e = catalog_get("ex2_2");
        const auto& G = e.extras.at("G(f1)");
        for (double r : {2.0, 6.0}) CHECK(N_O_bar(G, r) == 0.0);
    }

    SUBCASE("N_O = 0 for all r iff every ledger entry has even multiplicity") {
        SingularityLedger led;
        led.points.push_back({Complex(0.8, 0.1), 2, SingKind::pole});
        led.points.push_back({Complex(-1.2, 0.4), 3, SingKind::zero});
        MeromorphicFunction f(Expr::constant(1.0), led, "mixed");
        CHECK(N_O(f, 1.0) == 0.0);  // odd zero not yet inside
        CHECK(N_O(f, 2.0) > 0.0);   // and now it is
    }

    SUBCASE("an incomplete ledger is refused") {
        auto e = catalog_get("ex5_1");
        const auto& G = e.extras.at("G(f1)");
        CHECK_THROWS_AS(N_O_bar(G, 9.4), IncompleteLedger);
    }
}

TEST_CASE("nevanlinna: characteristic and growth ratio") {
    SUBCASE("T of a constant is flat") {
        MeromorphicFunction c(Expr::constant(2.0), {}, "2");
        for (double r : {2.0, 9.0, 30.0}) {
            auto est = characteristic_T(c, r, 512);
            CHECK(est.T == doctest::Approx(std::log(2.0)).epsilon(1e-12));
            CHECK(est.T == est.m + est.N);
        }
    }

    SUBCASE("T = m + N as stored, with N from the ledger") {
        auto fb = catalog_get("ex2_2").solutions[0];
        auto est = characteristic_T(fb, 10.5, 2048);
        CHECK(est.T == est.m + est.N);
        CHECK(est.N == doctest::Approx(counting(fb, 10.5).N).epsilon(1e-15));
        CHECK(est.m >= 0.0);
    }

    SUBCASE("T(20, sin) is close to 2r/pi for an entire function") {
        auto s = catalog_get("ex2_1", {{"a", Expr::constant(1.0)}});
        // a = 1 rebuilds plain sin/cos
        auto est = characteristic_T(s.solutions[0], 20.0, 2048);
        CHECK(est.N == 0.0);
        CHECK(std::abs(est.T - 2.0 * 20.0 / kPi) <= 0.06 * (2.0 * 20.0 / kPi));
    }

    SUBCASE("identical functions give ratio exactly 1") {
        auto f = catalog_get("ex2_1").solutions[0];
        auto rep = growth_ratio(f, f, {5.0, 10.0, 15.0}, 512);
        for (const auto& p : rep.points) CHECK(p.ratio == 1.0);
        CHECK(rep.drift == 0.0);
    }

    SUBCASE("sine/cosine pair trends to ratio 1") {
        auto e = catalog_get("ex2_1", {{"a", Expr::constant(kPi / 3.0)}});
        std::vector<double> radii;
        for (double r = 5.0; r <= 50.0; r += 7.5) radii.push_back(r);
        auto rep = growth_ratio(e.solutions[0], e.solutions[1], radii, 1024);
        CHECK(std::abs(rep.final_ratio - 1.0) <= 0.05);
    }

    SUBCASE("growth-separated pair stays far from ratio 1") {
        ParamEnv q2{{"Q", parse("exp(2*pi*i*5*z)")}};
        auto e1 = catalog_get("ex5_1");
        auto e2 = catalog_get("ex5_1", q2);
        auto rep = growth_ratio(e1.solutions[0], e2.solutions[0], {4.5, 6.5, 8.5, 10.5}, 1024);
        CHECK(rep.final_ratio < 0.5);
        CHECK(std::abs(rep.final_ratio - 0.2) < 0.1);
    }

    SUBCASE("zero characteristic in the denominator is refused") {
        auto f = catalog_get("ex2_1").solutions[0];
        MeromorphicFunction one(Expr::constant(1.0), {}, "1");
        CHECK_THROWS_AS(growth_ratio(f, one, {5.0}, 512), ZeroCharacteristic);
    }

    SUBCASE("T is nondecreasing in r across catalog functions") {
        MeromorphicFunction zoo[] = {
            catalog_get("ex2_2").solutions[0],
            catalog_get("ex2_1").solutions[0],
            catalog_get("ex2_4").solutions[0],
            catalog_get("ex3_1").solutions[0],
        };
        for (const auto& f : zoo) {
            double prev = 0.0;
            for (int k = 0; k < 20; ++k) {
                double r = 1.65 + 0.7 * k;
                auto est = characteristic_T(f, r, 1024);
                CHECK(est.T >= prev - 2.0 * (est.quad_error + 1e-9));
                prev = est.T;
            }
        }
    }

    SUBCASE("first-main-theorem sanity: T(r, f) - T(r, 1/f) is about constant") {
        auto fb = catalog_get("ex2_2").solutions[0];
        auto inv = fb.reciprocal();
        std::vector<double> diffs, Ts;
        for (double r = 5.5; r <= 50.0; r += 6.0) {
            auto a = characteristic_T(fb, r, 2048);
            auto b = characteristic_T(inv, r, 2048);
            diffs.push_back(a.T - b.T);
            Ts.push_back(a.T);
        }
        double mean = 0.0;
        for (double d : diffs) mean += d;
        mean /= diffs.size();
        double worst = 0.0, tmax = 0.0;
        for (std::size_t k = 0; k < diffs.size(); ++k) {
            worst = std::max(worst, std::abs(diffs[k] - mean));
            tmax = std::max(tmax, Ts[k]);
        }
        CHECK(worst <= 0.1 * tmax);
    }
}

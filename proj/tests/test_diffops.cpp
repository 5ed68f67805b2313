#include <doctest.h>

#include "dn/diffops.hpp"
#include "dn/grid.hpp"
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

std::vector<Complex> offset_grid(std::size_t n) {
    // deterministic lattice in a 2x2 box, offset away from the integer lattice
    std::vector<Complex> out;
    std::size_t m = 10;
    for (std::size_t i = 0; i < m && out.size() < n; ++i)
        for (std::size_t j = 0; j < m && out.size() < n; ++j)
            out.emplace_back(-0.93 + 0.19 * static_cast<double>(i),
                             -0.87 + 0.17 * static_cast<double>(j));
    return out;
}

} // namespace

TEST_CASE("diffops: forward difference") {
    SUBCASE("delta sin(az) equals 2 sin(a/2) cos(a(z+1/2))") {
        double a = kPi / 2.0;
        Expr f = sin(Expr::constant(a) * zvar());
        Expr df = delta(f);
        for (Complex z : offset_grid(40)) {
            Complex expect = 2.0 * std::sin(a / 2.0) * std::cos(a * (z + 0.5));
            CHECK(std::abs(df(z).get() - expect) <= 1e-12 * (1.0 + std::abs(expect)));
        }
    }

    SUBCASE("delta of a constant vanishes") {
        Expr df = delta(Expr::constant(Complex(3.0, -2.0)));
        for (Complex z : offset_grid(10)) CHECK(std::abs(df(z).get()) == 0.0);
    }

    SUBCASE("delta z^2 at 3 is 7") {
        CHECK(std::abs(delta(pow(zvar(), 2))(Complex(3.0, 0.0)).get() - 7.0) < 1e-12);
    }
}

TEST_CASE("diffops: second difference") {
    SUBCASE("delta2 z^2 is 2 everywhere") {
        Expr d = delta2(pow(zvar(), 2));
        for (Complex z : offset_grid(20)) CHECK(std::abs(d(z).get() - 2.0) < 1e-12);
    }

    SUBCASE("delta2 of a linear function vanishes") {
        Expr d = delta2(Expr::constant(2.5) * zvar() + Expr::constant(1.0));
        for (Complex z : offset_grid(20)) CHECK(std::abs(d(z).get()) < 1e-14);
    }

    SUBCASE("delta2 equals delta of delta on a function zoo") {
        std::vector<Expr> zoo = {
            sin(Expr::constant(kPi / 3.0) * zvar()),
            f_b_expr(Complex(1.0, 0.0)),
            pow(zvar(), 3),
        };
        for (const auto& f : zoo) {
            Expr a = delta2(f);
            Expr b = delta(delta(f));
            for (Complex z : offset_grid(60)) {
                Value va = a(z), vb = b(z);
                if (!va.is_finite() || !vb.is_finite()) continue;
                CHECK(std::abs(va.get() - vb.get()) <= 1e-12 * (1.0 + std::abs(vb.get())));
            }
        }
    }
}

TEST_CASE("diffops: Casoratian") {
    SUBCASE("sin/cos pair gives the constant -sin a") {
        double a = kPi / 3.0;
        Expr H = casoratian(sin(Expr::constant(a) * zvar()), cos(Expr::constant(a) * zvar()));
        for (Complex z : offset_grid(50))
            CHECK(std::abs(H(z).get() + std::sin(a)) < 1e-12);
    }

    SUBCASE("equal arguments give zero") {
        Expr f = sin(Expr::constant(1.3) * zvar());
        Expr H = casoratian(f, f);
        for (Complex z : offset_grid(20)) CHECK(std::abs(H(z).get()) < 1e-13);
    }

    SUBCASE("constant against identity") {
        Expr H = casoratian(Expr::constant(1.0), zvar());
        for (Complex z : offset_grid(20)) CHECK(std::abs(H(z).get() - 1.0) < 1e-14);
    }

    SUBCASE("antisymmetry") {
        Expr f1 = f_b_expr(Complex(1.0, 0.0));
        Expr f2 = f_b_expr(Complex(2.0, 0.0));
        Expr a = casoratian(f1, f2);
        Expr b = casoratian(f2, f1);
        for (Complex z : offset_grid(60)) {
            Value va = a(z), vb = b(z);
            if (!va.is_finite() || !vb.is_finite()) continue;
            CHECK(std::abs(va.get() + vb.get()) <= 1e-12 * (1.0 + std::abs(vb.get())));
        }
    }

    SUBCASE("the sin/cos Casoratian is 1-periodic") {
        double a = kPi / 3.0;
        Expr H = casoratian(sin(Expr::constant(a) * zvar()), cos(Expr::constant(a) * zvar()));
        auto grid = offset_grid(100);
        double defect = periodicity_defect(H, Complex(1.0, 0.0), grid);
        CHECK(defect <= 1e-9 * grid_scale(H, grid));
    }
}

TEST_CASE("diffops: periodicity defect") {
    SUBCASE("f_b is 2-periodic on a 100-point grid") {
        Expr f = f_b_expr(Complex(2.0, 0.0));
        auto grid = offset_grid(100);
        double defect = periodicity_defect(f, Complex(2.0, 0.0), grid);
        CHECK(defect <= 1e-10 * grid_scale(f, grid));
    }

    SUBCASE("sin z is far from 2-periodic") {
        std::vector<Complex> grid = offset_grid(99);
        grid.push_back(Complex(0.0, 0.0)); // |sin 2| ~ 0.909 there
        CHECK(periodicity_defect(sin(zvar()), Complex(2.0, 0.0), grid) >= 0.5);
    }

    SUBCASE("period 0 always gives 0") {
        CHECK(periodicity_defect(f_b_expr(Complex(1.0, 0.0)), Complex(0.0, 0.0),
                                 offset_grid(10)) == 0.0);
    }

    SUBCASE("a singular grid point throws") {
        std::vector<Complex> grid = {Complex(0.0, 0.0)};
        CHECK_THROWS_AS(
            periodicity_defect(Expr::constant(1.0) / zvar(), Complex(1.0, 0.0), grid),
            SingularGridPoint);
    }
}

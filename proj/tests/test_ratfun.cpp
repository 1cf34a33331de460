#include <doctest.h>

#include <algorithm>
#include <random>

#include "greybox/errors.hpp"
#include "greybox/ratfun.hpp"
#include "test_support.hpp"

using namespace greybox;
using greybox::test::rel_err;

namespace {

std::vector<Complex> sorted(std::vector<Complex> v) {
    std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
        if (std::abs(a.real() - b.real()) > 1e-9) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return v;
}

}  // namespace

TEST_CASE("polynomial storage keeps a monic part and a gain") {
    Polynomial p{2.0, 4.0, 0.0, 0.0};
    CHECK(p.degree() == 1);
    CHECK(p.gain() == Complex(4.0));
    CHECK(p.monic().back() == Complex(1.0));
    CHECK(p.coeff(0) == Complex(2.0));
    CHECK(Polynomial{}.is_zero());
    CHECK(Polynomial{0.0, 0.0}.is_zero());

    std::mt19937 rng(3);
    const Polynomial q = test::random_poly(rng, 6);
    const Complex s{0.3, -0.7};
    Complex horner{0.0, 0.0};
    const auto c = q.coeffs();
    for (auto it = c.rbegin(); it != c.rend(); ++it) horner = horner * s + *it;
    CHECK(rel_err(q(s), horner) < 1e-14);
}

TEST_CASE("subtraction that cancels exactly drops the degree") {
    const Polynomial a{1.0, 2.0, 3.0};
    const Polynomial b{0.5, 2.0, 3.0};
    const Polynomial d = a - b;
    CHECK(d.degree() == 0);
    CHECK(d.coeff(0) == Complex(0.5));
    CHECK((a - a).is_zero());
}

TEST_CASE("poly_roots on factorable quadratics") {
    auto r = sorted(poly_roots(Polynomial{1.0, 0.0, 1.0}));
    REQUIRE(r.size() == 2);
    CHECK(std::abs(r[0] - Complex(0.0, -1.0)) < 1e-14);
    CHECK(std::abs(r[1] - Complex(0.0, 1.0)) < 1e-14);

    r = sorted(poly_roots(Polynomial{2.0, 3.0, 1.0}));
    REQUIRE(r.size() == 2);
    CHECK(std::abs(r[0] - Complex(-2.0)) < 1e-14);
    CHECK(std::abs(r[1] - Complex(-1.0)) < 1e-14);
}

TEST_CASE("poly_roots rejects the zero polynomial") {
    CHECK_THROWS_AS(poly_roots(Polynomial{}), UsageError);
    CHECK(poly_roots(Polynomial{3.0}).empty());
}

TEST_CASE("poly_roots keeps exact zero roots") {
    auto r = poly_roots(Polynomial{0.0, 0.0, 2.0, 1.0});
    REQUIRE(r.size() == 3);
    r = sorted(r);
    CHECK(r[0] == Complex(-2.0));
    CHECK(r[1] == Complex(0.0));
    CHECK(r[2] == Complex(0.0));
}

TEST_CASE("degree-8 roots match the independently computed companion eigenvalues") {
    // Reference roots: LAPACK companion eigenvalues cross-checked with a
    // 40-digit mpmath solve (agreement < 1.1e-15).
    const Polynomial p{{0.7, -0.2}, {-1.3, 0.5}, {2.1, 0.0},  {0.4, -1.1},  {-0.9, 0.3},
                       {1.5, 0.8},  {-0.6, -0.4}, {0.25, 1.2}, {1.0, -0.5}};
    const std::vector<Complex> expected = {
        {-1.1221472715601524, -0.79228074502415891}, {-0.97543328557947306, 0.1701651769550333},
        {-0.099467563323712802, -1.0440884232611478}, {-0.001700453871488064, 1.144999754856451},
        {0.27075612956610506, 0.40546462347759382},   {0.41614437714243668, -0.50494126825437435},
        {0.84561489436950632, 0.45451035375485527},   {0.94623317325677825, -0.89382947250425226}};
    auto roots = poly_roots(p);
    REQUIRE(roots.size() == expected.size());
    for (const auto& e : expected) {
        double best = 1e300;
        for (const auto& r : roots) best = std::min(best, std::abs(r - e));
        CHECK(best < 1e-8);
    }
}

TEST_CASE("poly_roots residual and polishing idempotence on random polynomials") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const int degree = 1 + trial % 12;
        const Polynomial p = test::random_poly(rng, degree);
        const auto roots = poly_roots(p);
        REQUIRE(static_cast<int>(roots.size()) == degree);
        for (const auto& r : roots) {
            CHECK(std::abs(p(r)) / (1.0 + p.max_abs_coeff()) < 1e-8);
            CHECK(std::abs(polish_root(p, r) - r) < 1e-12);
        }
    }
}

TEST_CASE("rat_det of simple matrices") {
    CHECK(std::abs(rat_det(RationalMatrix::identity(2))(Complex{0.3, 0.2}) - 1.0) < 1e-15);
    const auto one = rat_det(RationalMatrix::identity(2));
    CHECK(one.num().degree() == 0);
    CHECK(one.den().degree() == 0);

    RationalMatrix m(2);
    m(0, 0) = RationalFunction(Polynomial{1.0}, Polynomial{1.0, 1.0});
    m(1, 1) = RationalFunction(Polynomial{0.0, 1.0});
    const RationalFunction d = rat_det(m);
    CHECK(d.num().degree() == 1);
    CHECK(d.den().degree() == 1);
    CHECK(std::abs(d.num().coeff(1) - 1.0) < 1e-15);
    CHECK(std::abs(d.num().coeff(0)) < 1e-15);
    CHECK(std::abs(d.den().coeff(0) - 1.0) < 1e-15);
}

TEST_CASE("rat_det agrees with the pointwise LU determinant") {
    std::mt19937 rng(5);
    for (int n : {1, 2, 3, 4, 5, 6}) {
        const RationalMatrix m = test::random_rational_matrix(rng, n);
        const RationalFunction d = rat_det(m);
        for (int k = 0; k < 10; ++k) {
            const Complex s = test::random_probe(rng);
            const Complex oracle = m.evaluate(s).partialPivLu().determinant();
            CHECK_MESSAGE(rel_err(d(s), oracle) < 1e-8, "n=" << n);
        }
    }
}

TEST_CASE("rat_det cancels denominators shared between rows") {
    // Nodal-admittance style: the branch admittance appears in two rows, so
    // the cleared rows carry its pole twice while det has it once.
    const RationalFunction g(Polynomial{1.0}, Polynomial{0.5, 2.0});
    const RationalFunction c1(Polynomial{0.0, 1.0});
    const RationalFunction c2(Polynomial{0.0, 3.0});
    RationalMatrix y(2);
    y(0, 0) = c1 + g;
    y(1, 1) = c2 + g;
    y(0, 1) = -g;
    y(1, 0) = -g;
    const RationalFunction d = rat_det(y);
    // det = 3 s^2 + 4 s g, i.e. s (3 s (0.5 + 2 s) + 4) / (0.5 + 2 s).
    CHECK(d.den().degree() == 1);
    CHECK(d.num().degree() == 3);
    const Complex s{0.4, 1.1};
    CHECK(rel_err(d(s), 3.0 * s * s + 4.0 * s * g(s)) < 1e-13);
}

TEST_CASE("rat_derivative") {
    const RationalFunction constant = RationalFunction::constant(4.2);
    CHECK(rat_derivative(constant).is_zero());

    const RationalFunction f(Polynomial{1.0}, Polynomial{1.0, 1.0});
    const RationalFunction df = rat_derivative(f);
    CHECK(df.den().degree() == 2);
    CHECK(df.num().degree() == 0);
    CHECK(std::abs(df.num().coeff(0) + 1.0) < 1e-15);
    CHECK(std::abs(df.den().coeff(1) - 2.0) < 1e-15);

    std::mt19937 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const RationalFunction g = test::random_rational(rng, 3, 2).normalized();
        const RationalFunction dg = rat_derivative(g);
        const Complex s = test::random_probe(rng);
        const double h = 1e-4;
        const Complex fd = (g(s + h) - g(s - h)) / (2.0 * h);
        CHECK(rel_err(dg(s), fd) < 1e-6);
    }
}

TEST_CASE("rat_derivative cancels the repeated-pole factor") {
    // f = 1/(s+1)^2, f' = -2/(s+1)^3: the quotient rule gives (s+1)^4 below.
    const RationalFunction f(Polynomial{1.0}, Polynomial{1.0, 2.0, 1.0});
    const RationalFunction df = rat_derivative(f);
    CHECK(df.den().degree() == 3);
    CHECK(df.num().degree() == 0);
    CHECK(rel_err(df(Complex{0.5, 0.5}), -2.0 / std::pow(Complex{1.5, 0.5}, 3)) < 1e-12);
}

TEST_CASE("normalization recovers a function after multiplying in a common factor") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const RationalFunction f = test::random_rational(rng, 3, 3).normalized();
        const Complex a = test::random_complex(rng, 2.0);
        const Polynomial factor{-a, 1.0};
        const RationalFunction g = RationalFunction(f.num() * factor, f.den() * factor).normalized();
        REQUIRE(g.num().degree() == f.num().degree());
        REQUIRE(g.den().degree() == f.den().degree());
        for (int k = 0; k <= f.num().degree(); ++k) CHECK(std::abs(g.num().coeff(k) - f.num().coeff(k)) < 1e-9);
        for (int k = 0; k <= f.den().degree(); ++k) CHECK(std::abs(g.den().coeff(k) - f.den().coeff(k)) < 1e-9);
    }
}

TEST_CASE("rational addition uses the least common denominator") {
    const RationalFunction a(Polynomial{1.0}, Polynomial{1.0, 1.0});
    const RationalFunction b(Polynomial{2.0}, Polynomial{2.0, 2.0});
    const RationalFunction c(Polynomial{1.0}, Polynomial{2.0, 1.0});
    CHECK((a + b).den().degree() == 1);
    CHECK((a + c).den().degree() == 2);
    CHECK((a - a).is_zero());
    const RationalFunction ab = (a * c) / c;
    CHECK(std::abs(ab(Complex{0.1, 0.2}) - a(Complex{0.1, 0.2})) < 1e-15);
    CHECK_THROWS_AS(a / RationalFunction{}, NumericalError);
    CHECK_THROWS_AS(RationalFunction(Polynomial{1.0}, Polynomial{}), UsageError);
}

TEST_CASE("rat_inverse satisfies M * M^{-1} = I pointwise") {
    std::mt19937 rng(29);
    for (int n : {1, 2, 3, 4, 5}) {
        const RationalMatrix m = test::random_rational_matrix(rng, n);
        const RationalMatrix inv = rat_inverse(m);
        for (int k = 0; k < 5; ++k) {
            const Complex s = test::random_probe(rng);
            const ComplexMatrix prod = m.evaluate(s) * inv.evaluate(s);
            CHECK_MESSAGE((prod - ComplexMatrix::Identity(n, n)).norm() < 1e-8, "n=" << n);
        }
    }
    CHECK_THROWS_AS(rat_inverse(RationalMatrix(2)), NumericalError);
}

#include <doctest.h>

#include <random>

#include "greybox/errors.hpp"
#include "greybox/netmodel.hpp"
#include "test_support.hpp"

using namespace greybox;
using greybox::test::rel_err;

namespace {

const Complex jay{0.0, 1.0};

ComplexMatrix identity(int n) { return ComplexMatrix::Identity(n, n); }

Complex rl(double r, double l, Complex s) { return 1.0 / (r + s * l); }

Complex rlc(double r, double l, double c, Complex s) { return rl(r, l, s) + s * c; }

}  // namespace

TEST_CASE("single shunt capacitor gives [sC]") {
    NetworkModel net;
    net.add_node("a");
    net.add_shunt("c", 0, ComponentKind::Capacitor, {{"C", 2.5}});
    const RationalMatrix y = build_ynodal(net);
    REQUIRE(y.dim() == 1);
    for (Complex s : {Complex{0.3, 1.0}, Complex{-2.0, 0.5}}) CHECK(rel_err(y.evaluate(s)(0, 0), 2.5 * s) < 1e-14);
}

TEST_CASE("branch between two nodes gives the incidence form") {
    NetworkModel net;
    net.add_node("a");
    net.add_node("b");
    net.add_branch("g", 0, 1, {{"R", 1.0}, {"L", 0.5}});
    const Complex s{0.2, 1.3};
    const Complex g = rl(1.0, 0.5, s);
    const ComplexMatrix y = build_ynodal(net).evaluate(s);
    ComplexMatrix expect(2, 2);
    expect << g, -g, -g, g;
    CHECK(rel_err(y, expect) < 1e-14);
}

TEST_CASE("three-node Y_nodal has the summed diagonal structure") {
    const NetworkModel net = test::three_node();
    const Complex s = jay;
    const auto& c = [&](const char* id) { return net.component(id); };
    const auto y = [&](const char* id) { return component_admittance(c(id)).evaluate(s)(0, 0); };
    const ComplexMatrix m = build_ynodal(net).evaluate(s);
    CHECK(rel_err(m(0, 0), y("y11") + y("y12") + y("y13")) < 1e-13);
    CHECK(rel_err(m(1, 1), y("y22") + y("y12") + y("y23")) < 1e-13);
    CHECK(rel_err(m(2, 2), y("y33") + y("y13") + y("y23")) < 1e-13);
    CHECK(rel_err(m(0, 1), -y("y12")) < 1e-13);
    CHECK(rel_err(m(0, 2), -y("y13")) < 1e-13);
    CHECK(rel_err(m(1, 2), -y("y23")) < 1e-13);
    CHECK(rel_err(y("y11"), rlc(0.22, 9.13, 0.91, s)) < 1e-14);
}

TEST_CASE("Z_sys of a parallel RLC node is (1+s)/(s^2+s+1)") {
    const NetworkModel net = test::parallel_rlc(1.0, 1.0, 1.0);
    const WholeSystemModel z = build_zsys(net);
    CHECK_FALSE(z.za_free);
    const ZsysEvaluator eval(net);
    std::mt19937 rng(7);
    for (int k = 0; k < 5; ++k) {
        const Complex s = test::random_complex(rng, 3.0);
        const Complex expect = (1.0 + s) / (s * s + s + 1.0);
        CHECK(rel_err(z.matrix.evaluate(s)(0, 0), expect) < 1e-10);
        CHECK(rel_err(eval(s)(0, 0), expect) < 1e-12);
    }
}

TEST_CASE("Z_sys inverts Y_nodal on the three-node circuit") {
    const NetworkModel net = test::three_node();
    const RationalMatrix y = build_ynodal(net);
    const WholeSystemModel z = build_zsys(net);
    const ZsysEvaluator eval(net);
    CHECK(rel_err(z.matrix.evaluate(jay) * y.evaluate(jay), identity(3)) < 1e-8);
    std::mt19937 rng(11);
    for (int k = 0; k < 5; ++k) {
        const Complex s = test::random_complex(rng, 2.0);
        CHECK(rel_err(z.matrix.evaluate(s) * y.evaluate(s), identity(3)) < 1e-8);
        CHECK(rel_err(eval(s) * y.evaluate(s), identity(3)) < 1e-10);
    }
}

TEST_CASE("symbolic whole-system formulas match their definitions") {
    const NetworkModel net = test::three_node();
    const RationalMatrix yn = build_ynetwork(net);
    const auto za = build_zapparatus(net);
    REQUIRE(za.has_value());
    const RationalMatrix z = whole_system_impedance(yn, *za);
    const RationalMatrix ysys = whole_system_admittance(yn, *za);
    const Complex s{0.5, 2.0};
    const ComplexMatrix f = identity(3) + yn.evaluate(s) * za->evaluate(s);
    CHECK(rel_err(z.evaluate(s) * f, za->evaluate(s)) < 1e-8);
    CHECK(rel_err(f * ysys.evaluate(s), yn.evaluate(s)) < 1e-8);
    CHECK(rel_err(f * build_ysys(net).matrix.evaluate(s), yn.evaluate(s)) < 1e-8);
}

TEST_CASE("no branches: Z_sys = Z_A and Y_sys = 0") {
    NetworkModel net;
    net.add_node("a");
    net.add_node("b");
    net.add_shunt("ya", 0, ComponentKind::ParallelRLC, {{"R", 1.0}, {"L", 2.0}, {"C", 0.5}});
    net.add_shunt("yb", 1, ComponentKind::SeriesRL, {{"R", 0.3}, {"L", 1.5}});
    net.validate();
    const Complex s{0.1, 0.7};
    const ComplexMatrix za = build_zapparatus(net)->evaluate(s);
    CHECK(rel_err(build_zsys(net).matrix.evaluate(s), za) < 1e-12);
    CHECK(rel_err(ZsysEvaluator(net)(s), za) < 1e-12);
    CHECK(build_ysys(net).matrix.evaluate(s).norm() < 1e-14);
}

TEST_CASE("zero Z_A gives Y_sys = Y_N") {
    const NetworkModel net = test::three_node();
    const RationalMatrix yn = build_ynetwork(net);
    const RationalMatrix zero(3);
    const Complex s{0.4, 1.1};
    CHECK(rel_err(whole_system_admittance(yn, zero).evaluate(s), yn.evaluate(s)) < 1e-12);
}

TEST_CASE("node without shunt uses the inverse route") {
    NetworkModel net;
    net.add_node("a");
    net.add_node("b");
    net.add_shunt("ya", 0, ComponentKind::ParallelRLC, {{"R", 1.0}, {"L", 1.0}, {"C", 1.0}});
    net.add_branch("g", 0, 1, {{"R", 0.5}, {"L", 0.2}});
    net.add_shunt("cb", 1, ComponentKind::Capacitor, {{"C", 0.3}});
    CHECK_FALSE(build_zsys(net).za_free);

    NetworkModel bare;
    bare.add_node("a");
    bare.add_node("b");
    bare.add_shunt("ya", 0, ComponentKind::ParallelRLC, {{"R", 1.0}, {"L", 1.0}, {"C", 1.0}});
    bare.add_branch("g", 0, 1, {{"R", 0.5}, {"L", 0.2}});
    bare.validate();
    const WholeSystemModel z = build_zsys(bare);
    CHECK(z.za_free);
    CHECK(ZsysEvaluator(bare).za_free());
    CHECK_FALSE(build_zapparatus(bare).has_value());
    const Complex s{0.3, 0.9};
    CHECK(rel_err(z.matrix.evaluate(s) * build_ynodal(bare).evaluate(s), identity(2)) < 1e-10);
}

TEST_CASE("incidence patterns") {
    const NetworkModel net = test::three_node();
    SUBCASE("shunt at node 2") {
        const ComplexMatrix d = incidence_pattern(net, "y22").dense(net);
        ComplexMatrix expect = ComplexMatrix::Zero(3, 3);
        expect(1, 1) = 1.0;
        CHECK(d == expect);
    }
    SUBCASE("branch 1-3") {
        const ComplexMatrix d = incidence_pattern(net, "y13").dense(net);
        ComplexMatrix expect = ComplexMatrix::Zero(3, 3);
        expect(0, 0) = expect(2, 2) = 1.0;
        expect(0, 2) = expect(2, 0) = -1.0;
        CHECK(d == expect);
        CHECK(d == d.transpose());
    }
    SUBCASE("unknown component") { CHECK_THROWS_AS(incidence_pattern(net, "nope"), UsageError); }
    SUBCASE("finite-difference bump matches the pattern") {
        const Complex s{0.2, 1.4};
        const ComplexMatrix base = build_ynodal(net).evaluate(s);
        for (const auto& c : net.components()) {
            const double delta = 1e-6;
            const ComplexMatrix bumped = build_ynodal(net.with_scaled_admittance(c.id, 1.0 + delta)).evaluate(s);
            const Complex dy = delta * component_admittance(c).evaluate(s)(0, 0);
            const ComplexMatrix expect = dy * incidence_pattern(net, c.id).dense(net);
            CHECK((bumped - base - expect).norm() < 1e-9);
        }
    }
}

TEST_CASE("parameter derivatives") {
    NetworkModel net;
    net.add_node("a");
    net.add_shunt("c", 0, ComponentKind::Capacitor, {{"C", 1.0}});
    net.add_shunt("rl", 0, ComponentKind::SeriesRL, {{"R", 1.0}, {"L", 1.0}});
    net.add_shunt("rlc", 0, ComponentKind::ParallelRLC, {{"R", 0.5}, {"L", 2.0}, {"C", 0.1}});

    CHECK(rel_err(param_derivative(net.component("c"), "C", Complex{0, 2})(0, 0), Complex{0, 2}) < 1e-15);

    const Complex s = jay;
    const Complex analytic = param_derivative(net.component("rl"), "R", s)(0, 0);
    CHECK(rel_err(analytic, -1.0 / ((1.0 + s) * (1.0 + s))) < 1e-14);
    const double h = 1e-5;
    const Complex fd = (rl(1.0 + h, 1.0, s) - rl(1.0 - h, 1.0, s)) / (2 * h);
    CHECK(rel_err(analytic, fd) < 1e-8);

    for (const char* p : {"R", "L", "C"}) {
        const Complex s0{0.3, 0.8};
        const Component& c = net.component("rlc");
        const double v = c.param(p), step = 1e-6 * v;
        const auto at = [&](double value) {
            return component_admittance(net.with_parameter("rlc", p, value).component("rlc")).evaluate(s0)(0, 0);
        };
        CHECK(rel_err(param_derivative(c, p, s0)(0, 0), (at(v + step) - at(v - step)) / (2 * step)) < 1e-7);
    }
    CHECK(std::abs(param_derivative(net.component("rlc"), "L", 0.0)(0, 0)) == 0.0);
    CHECK_THROWS_AS(param_derivative(net.component("c"), "R", s), UsageError);
}

TEST_CASE("reciprocity, conjugate symmetry and additivity") {
    const NetworkModel net = test::three_node();
    const RationalMatrix y = build_ynodal(net);
    std::mt19937 rng(3);
    for (int k = 0; k < 5; ++k) {
        const Complex s = test::random_complex(rng, 2.0);
        const ComplexMatrix m = y.evaluate(s);
        CHECK((m - m.transpose()).norm() < 1e-14 * m.norm());
        CHECK((y.evaluate(std::conj(s)) - m.conjugate()).norm() < 1e-14 * m.norm());
    }
    NetworkModel more = net;
    more.add_shunt("extra", 1, ComponentKind::Capacitor, {{"C", 0.4}});
    const Complex s{0.1, 0.9};
    ComplexMatrix diff = build_ynodal(more).evaluate(s) - y.evaluate(s);
    CHECK(std::abs(diff(1, 1) - 0.4 * s) < 1e-13);
    diff(1, 1) = 0.0;
    CHECK(diff.norm() < 1e-13);
}

TEST_CASE("validation rejects malformed networks") {
    SUBCASE("self loop") {
        NetworkModel net;
        net.add_node("a");
        net.add_shunt("c", 0, ComponentKind::Capacitor, {{"C", 1.0}});
        net.add_branch("g", 0, 0, {{"R", 1.0}, {"L", 1.0}});
        CHECK_THROWS_AS(net.validate(), UsageError);
    }
    SUBCASE("floating node") {
        NetworkModel net;
        net.add_node("a");
        net.add_node("b");
        net.add_shunt("c", 0, ComponentKind::Capacitor, {{"C", 1.0}});
        CHECK_THROWS_AS(net.validate(), UsageError);
    }
    SUBCASE("negative resistance") {
        NetworkModel net = test::parallel_rlc(-1.0, 1.0, 1.0);
        CHECK_THROWS_AS(net.validate(), UsageError);
    }
    SUBCASE("zero inductance") {
        NetworkModel net = test::parallel_rlc(1.0, 0.0, 1.0);
        CHECK_THROWS_AS(net.validate(), UsageError);
    }
    SUBCASE("duplicate component id") {
        NetworkModel net = test::parallel_rlc(1.0, 1.0, 1.0);
        net.add_shunt("tank", 0, ComponentKind::Capacitor, {{"C", 1.0}});
        CHECK_THROWS_AS(net.validate(), UsageError);
    }
    SUBCASE("spectrum apparatus needs the measurement route") {
        NetworkModel net;
        net.add_node("a");
        Component c;
        c.id = "meas";
        c.kind = ComponentKind::Spectrum;
        c.from = 0;
        c.spectrum_source = "Z.csv";
        net.add_component(c);
        net.validate();
        CHECK(net.has_spectrum_apparatus());
        CHECK_THROWS_WITH_AS(build_ynodal(net), doctest::Contains("rational model required; use measurement route"),
                             UsageError);
    }
}

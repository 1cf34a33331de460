#include <doctest.h>

#include "greybox/errors.hpp"
#include "greybox/netfile.hpp"
#include "test_support.hpp"

using namespace greybox;
using greybox::test::rel_err;

namespace {

const char* kTwoPort = R"(# d-q apparatus on a two-port bus
[meta]
name = "dq"
unit = "rads"

[[nodes]]
id = "bus"
ports = 2

[[nodes]]
id = "grid"
ports = 2

[[branch]]
id = "line"
from = "bus"
to = "grid"
kind = "rational"
num = [[[1.0], [0.0]],
       [[0.0], [1.0]],]
den = [[[0.5, 0.1], [1.0]],
       [[1.0], [0.5, 0.1]]]

[[shunt]]
id = "conv"
node = "bus"
kind = "rational"
num = [[[1.0, 0.2], [0.05]], [[-0.05], [1.0, 0.2]]]
den = [[[0.0, 1.0], [1.0, 1.0]], [[1.0, 1.0], [0.0, 1.0]]]

[[shunt]]
id = "load"
node = "grid"
kind = "rational"
num = [[[0.0, 2.0], [0.0]], [[0.0], [0.0, 2.0]]]
den = [[[1.0], [1.0]], [[1.0], [1.0]]]
)";

void check_parse_error(const std::string& text, const std::string& fragment, int line) {
    try {
        parse_network(text);
        FAIL("expected a parse error containing " << fragment);
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find(fragment) != std::string::npos);
        CHECK(e.line() == line);
        CHECK(e.column() >= 1);
    }
}

const std::string kHead = "[meta]\nname = \"x\"\n[[nodes]]\nid = \"a\"\n";

}  // namespace

TEST_CASE("sample files parse") {
    const NetworkModel net = test::three_node();
    CHECK(net.name == "three_node");
    CHECK(net.frequency_unit == "hz");
    CHECK(net.nodes().size() == 3);
    REQUIRE(net.components().size() == 6);
    CHECK(net.components()[0].id == "y12");
    CHECK(net.components()[3].id == "y11");
    CHECK(net.component("y11").kind == ComponentKind::ParallelRLC);
    CHECK(net.component("y11").param("C") == 0.91);
    CHECK(net.component("y23").param("L") == 5.95);
    CHECK(net.is_passive_rlc());
    CHECK(test::sample("lc_tank.toml").component("coil").param("R") == 0.0);
}

TEST_CASE("two-port rational blocks") {
    const NetworkModel net = parse_network(kTwoPort);
    CHECK(net.frequency_unit == "rads");
    CHECK(net.port_count() == 4);
    CHECK(net.port_offset(1) == 2);
    const Component& conv = net.component("conv");
    REQUIRE(conv.block.has_value());
    CHECK(conv.width() == 2);
    const Complex s{0.1, 0.8};
    CHECK(rel_err(conv.block->at(1, 0)(s), Complex{-0.05} / (1.0 + s)) < 1e-15);
    const ComplexMatrix y = build_ynodal(net).evaluate(s);
    const Complex g = 1.0 / (0.5 + 0.1 * s);
    CHECK(rel_err(y(2, 2), g + 2.0 * s) < 1e-14);
    CHECK(rel_err(y(0, 2), -g) < 1e-14);
    CHECK(std::abs(y(0, 3)) == 0.0);
}

TEST_CASE("serialize then parse reproduces the network") {
    for (const std::string& text : {serialize_network(test::three_node()), std::string(kTwoPort)}) {
        const NetworkModel a = parse_network(text);
        const std::string once = serialize_network(a);
        const NetworkModel b = parse_network(once);
        CHECK(serialize_network(b) == once);
        const Complex s{0.3, 1.7};
        CHECK(rel_err(build_ynodal(b).evaluate(s), build_ynodal(a).evaluate(s)) == 0.0);
    }
}

TEST_CASE("numbers keep full precision through serialization") {
    NetworkModel net = test::parallel_rlc(0.1 + 0.2, 1.0 / 3.0, 7e-12);
    net.name = "precise \"quoted\"";
    const NetworkModel back = parse_network(serialize_network(net));
    CHECK(back.name == net.name);
    CHECK(back.component("tank").param("R") == 0.1 + 0.2);
    CHECK(back.component("tank").param("L") == 1.0 / 3.0);
    CHECK(back.component("tank").param("C") == 7e-12);
}

TEST_CASE("syntax errors carry line and column") {
    check_parse_error("[meta]\nname = \"x\"\n[[nodez]]\nid = \"a\"\n", "unknown section [[nodez]]", 3);
    check_parse_error("[meta\nname = \"x\"\n", "malformed section header", 1);
    check_parse_error(kHead + "id = \"b\"\n", "duplicate key 'id'", 5);
    check_parse_error(kHead + "colour = \"red\"\n", "unknown key 'colour'", 5);
    check_parse_error(kHead + "[[shunt]]\nid = \"c\"\nnode = \"a\"\nkind = \"c\"\nC = 1.0.0\n", "invalid number", 9);
    check_parse_error(kHead + "[[shunt]]\nid = \"c\"\nnode = \"zz\"\nkind = \"c\"\nC = 1.0\n", "unknown node 'zz'", 7);
    check_parse_error(kHead + "[[shunt]]\nid = \"c\"\nnode = \"a\"\nkind = \"coil\"\n", "unknown shunt kind", 8);
    check_parse_error(kHead + "[[shunt]]\nid = \"c\"\nnode = \"a\"\nkind = \"c\"\n", "missing key 'C'", 5);
    check_parse_error(kHead + "[[shunt]]\nid = \"c\"\nnode = \"a\"\nkind = \"c\"\nC = 1.0\nR = 2.0\n", "unknown key 'R'", 10);
    check_parse_error("name = \"x\"\n", "", 1);
    check_parse_error("[meta]\nunit = \"khz\"\n", "unit", 2);
}

TEST_CASE("semantic violations are usage errors") {
    CHECK_THROWS_AS(parse_network(kHead + "[[shunt]]\nid = \"c\"\nnode = \"a\"\nkind = \"c\"\nC = -1.0\n"), UsageError);
    CHECK_THROWS_AS(parse_network(kHead + "[[nodes]]\nid = \"b\"\n[[shunt]]\nid = \"c\"\nnode = \"a\"\nkind = \"c\"\nC = 1.0\n"),
                    UsageError);
    CHECK_THROWS_AS(load_network("/nonexistent/net.toml"), UsageError);
}

TEST_CASE("spectrum apparatus is accepted by the reader") {
    const NetworkModel net = parse_network(kHead + "[[shunt]]\nid = \"m\"\nnode = \"a\"\nkind = \"spectrum\"\nfile = \"Z_1_1.csv\"\n");
    CHECK(net.has_spectrum_apparatus());
    CHECK(net.component("m").spectrum_source == "Z_1_1.csv");
    CHECK(serialize_network(net).find("file = \"Z_1_1.csv\"") != std::string::npos);
}

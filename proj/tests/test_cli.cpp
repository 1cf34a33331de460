#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = GREYBOX_CLI;
const std::string kData = GREYBOX_DATA_DIR;
const std::string kThree = kData + "/three_node.toml";

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    Run r;
    FILE* p = ::popen((kCli + " " + args + " 2>/dev/null").c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    std::size_t n = 0;
    while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    const int status = ::pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("greybox_cli_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

double dist(const json& a, const json& b) {
    return std::hypot(a["re"].get<double>() - b["re"].get<double>(), a["im"].get<double>() - b["im"].get<double>());
}

}  // namespace

TEST_CASE("exit codes") {
    CHECK(run("modes " + kThree).code == 0);
    CHECK(run("").code == 3);
    CHECK(run("modes /nonexistent.toml").code == 3);
    CHECK(run("tune " + kThree + " --param y12.Q --pct 5").code == 3);
    CHECK(run("scan " + kThree + " --fmin 2 --fmax 1").code == 3);
    CHECK(run("fit /nonexistent --order 4").code == 3);

    TempDir dir("codes");
    std::ofstream(dir.path / "bad.toml") << "[meta]\nname = \"x\"\n[[nodez]]\n";
    CHECK(run("modes " + (dir.path / "bad.toml").string()).code == 2);
    std::ofstream(dir.path / "twin.toml") << "[meta]\nname = \"twin\"\n[[nodes]]\nid = \"a\"\n[[nodes]]\nid = \"b\"\n"
                                             "[[shunt]]\nid = \"ya\"\nnode = \"a\"\nkind = \"rlc\"\nR = 1.0\nL = 1.0\nC = 1.0\n"
                                             "[[shunt]]\nid = \"yb\"\nnode = \"b\"\nkind = \"rlc\"\nR = 1.0\nL = 1.0\nC = 1.0\n";
    CHECK(run("greybox " + (dir.path / "twin.toml").string() + " --mode 0").code == 4);
}

TEST_CASE("scan then fit reproduces the modes") {
    TempDir dir("fit");
    REQUIRE(run("scan " + kThree + " --fmin 0.001 --fmax 2 --points 200 --out-dir " + dir.path.string()).code == 0);
    const Run fit = run("fit " + dir.path.string() + " --order 9");
    REQUIRE(fit.code == 0);
    const json poles = json::parse(fit.out)["poles"];
    const json modes = json::parse(run("modes " + kThree).out)["modes"];
    REQUIRE(poles.size() == modes.size());
    for (const auto& m : modes) {
        double best = 1e300;
        for (const auto& p : poles) best = std::min(best, dist(m, p));
        CHECK(best / std::hypot(m["re"].get<double>(), m["im"].get<double>()) < 1e-4);
    }
}

TEST_CASE("output is deterministic") {
    for (const std::string& args : {"modes " + kThree, "greybox " + kThree + " --fraction 5",
                                    "scan " + kThree + " --fmin 0.01 --fmax 1 --points 50",
                                    "tune " + kThree + " --param y11.R --pct 5"}) {
        const Run a = run(args), b = run(args);
        CHECK(a.code == 0);
        CHECK(a.out == b.out);
    }
}

TEST_CASE("greybox report at zero fraction") {
    const Run r = run("greybox " + kThree + " --fraction 0");
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    for (const auto& e : doc["layer3"]) {
        CHECK(e["predicted"]["re"].get<double>() == 0.0);
        CHECK(e["predicted"]["im"].get<double>() == 0.0);
    }
    double total = 0.0;
    for (const auto& e : doc["layer2"]) total += std::hypot(e["share"]["re"].get<double>(), e["share"]["im"].get<double>());
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("a scan peak frequency selects the nearest mode") {
    const Run scan = run("scan " + kThree + " --fmin 0.001 --fmax 2 --entry 2,2 --out /dev/null");
    REQUIRE(scan.code == 0);
    const json peaks = json::parse(scan.out)["peaks"];
    REQUIRE(!peaks.empty());
    const double f = peaks[0]["freq_hz"].get<double>();
    const json modes = json::parse(run("modes " + kThree).out)["modes"];
    std::size_t nearest = 0;
    for (std::size_t k = 0; k < modes.size(); ++k)
        if (std::abs(modes[k]["freq_hz"].get<double>() - f) < std::abs(modes[nearest]["freq_hz"].get<double>() - f))
            nearest = k;
    const Run g = run("greybox " + kThree + " --mode " + std::to_string(f) + "hz");
    REQUIRE(g.code == 0);
    CHECK(json::parse(g.out)["mode"]["index"] == nearest);
}

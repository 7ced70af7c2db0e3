#include "doctest.h"

#include <array>
#include <cstdio>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run cli(const std::string& args) {
    Run r;
    const std::string cmd = std::string(CONECANON_CLI) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf{};
    while (const std::size_t n = std::fread(buf.data(), 1, buf.size(), p)) r.out.append(buf.data(), n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string spec(const char* name) { return std::string(CONECANON_SPECS) + "/" + name; }

} // namespace

TEST_CASE("potential reports F and passes") {
    const Run r = cli("potential --spec " + spec("orthant2.json") + " --at 1,1 --json");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["command"] == "potential");
    CHECK(j["F"].get<double>() == 0.0);
    CHECK(j["pass"] == true);
}

TEST_CASE("certify sc on Lorentz(3) finds 2/3") {
    const Run r = cli("certify --spec " + spec("lorentz3.json") + " --property sc --samples 200 --json");
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["statistic"].get<double>() == doctest::Approx(2.0 / 3).epsilon(1e-9));
}

TEST_CASE("reports are deterministic for a fixed seed") {
    const std::string args = "certify --spec " + spec("psd2.json") + " --property nu --samples 100 --seed 5 --json";
    CHECK(cli(args).out == cli(args).out);
}

TEST_CASE("ipm solves the LP and flags the infeasible program") {
    const Run ok = cli("ipm --prog " + spec("lp.json") + " --json");
    REQUIRE(ok.code == 0);
    const auto j = nlohmann::json::parse(ok.out);
    CHECK(j["x"][1].get<double>() == doctest::Approx(1).epsilon(1e-7));
    const Run bad = cli("ipm --prog " + spec("infeasible.json"));
    CHECK(bad.code == 1);
    CHECK(bad.out.find("FAIL") != std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(cli("potential --spec " + spec("orthant2.json") + " --at -1,1").code == 2);
    CHECK(cli("potential --spec /nonexistent.json --at 1,1").code == 2);
    CHECK(cli("bogus").code == 2);
    CHECK(cli("").code == 2);
}

TEST_CASE("validate accepts the pentagon") {
    const Run r = cli("validate --spec " + spec("pentagon.json"));
    CHECK(r.code == 0);
    CHECK(r.out.find("seed 1: pass") != std::string::npos);
}

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinRel;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args) {
    const char* bin = std::getenv("HARDYOPS_CLI");
    REQUIRE(bin != nullptr);
    const std::string cmd =
        std::string(bin) + " " + args + " > cli_stdout.tmp 2> cli_stderr.tmp";
    const int status = std::system(cmd.c_str());
    RunResult r;
    if (WIFEXITED(status)) r.code = WEXITSTATUS(status);
    r.out = read_file("cli_stdout.tmp");
    return r;
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_cli("analyze --map 'bogus spec'").code == 2);
    CHECK(run_cli("analyze").code == 2);
    CHECK(run_cli("analyze --map 'affine a=0.5 b=0' --format yaml").code == 2);
    CHECK(run_cli("verify nosuchsuite").code == 2);
}

TEST_CASE("validation errors exit with code 3") {
    CHECK(run_cli("analyze --map 'affine a=0.5 b=0.6'").code == 3);
    CHECK(run_cli("hs --map 'affine a=0.7 b=0.7'").code == 3);
}

TEST_CASE("nonconvergence exits with code 4") {
    CHECK(run_cli("lp-check --map 'affine a=0 b=0.9999999'").code == 4);
}

TEST_CASE("help exits cleanly") {
    const auto r = run_cli("--help");
    CHECK(r.code == 0);
    CHECK_THAT(r.out, ContainsSubstring("analyze"));
}

TEST_CASE("analyze reports the expected verdicts") {
    SECTION("strict contraction") {
        const auto r = run_cli("analyze --map 'affine a=0.5 b=0'");
        REQUIRE(r.code == 0);
        CHECK_THAT(r.out, ContainsSubstring("section,criterion,key,radius,value,verdict"));
        CHECK_THAT(r.out, ContainsSubstring("bounded-consistent"));
        CHECK_THAT(r.out, ContainsSubstring("HS-consistent"));
    }

    SECTION("identity map") {
        const auto r = run_cli("analyze --map 'monomial k=1'");
        REQUIRE(r.code == 0);
        CHECK_THAT(r.out, ContainsSubstring("unbounded-consistent"));
        CHECK_THAT(r.out, ContainsSubstring("not-HS-consistent"));
    }
}

TEST_CASE("analyze output is byte-identical across runs") {
    const std::string args = "analyze --map 'blaschke zeros=[0.5,-0.3+0.2i]' --order 2";
    REQUIRE(run_cli(args + " --out cli_run_a.tmp").code == 0);
    REQUIRE(run_cli(args + " --out cli_run_b.tmp").code == 0);
    const std::string a = read_file("cli_run_a.tmp");
    const std::string b = read_file("cli_run_b.tmp");
    REQUIRE(!a.empty());
    REQUIRE(a == b);
}

TEST_CASE("verify subcommand reports passes") {
    const auto r = run_cli("verify moments");
    CHECK(r.code == 0);
    CHECK_THAT(r.out, ContainsSubstring("[PASS]"));
    CHECK(r.out.find("[FAIL]") == std::string::npos);
}

TEST_CASE("hs rows parse as jsonl and reach the closed-form sum") {
    const auto r = run_cli("hs --map 'affine a=0.5 b=0' --format jsonl");
    REQUIRE(r.code == 0);
    std::istringstream lines(r.out);
    std::string line, last;
    bool first = true;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        const auto row = nlohmann::json::parse(line);
        if (first) {
            CHECK(row.contains("M"));
            CHECK(row.at("M").get<int>() == 1);
            first = false;
        }
        last = line;
    }
    const auto tail = nlohmann::json::parse(last);
    CHECK_THAT(tail.at("partial_sum").get<double>(), WithinRel(80.0 / 27.0, 1e-9));
    CHECK(tail.at("lower_bracket").get<double>() <= tail.at("partial_sum").get<double>());
}

TEST_CASE("lp-check accepts a custom polynomial") {
    const auto r = run_cli("lp-check --map 'monomial k=2' --f '[0,0,1]'");
    REQUIRE(r.code == 0);
    CHECK_THAT(r.out, ContainsSubstring("f,lhs,rhs,residual"));
    std::istringstream lines(r.out);
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    const double residual = std::stod(row.substr(row.rfind(',') + 1));
    CHECK(residual < 1e-6);
}

TEST_CASE("nevanlinna dumps a grid") {
    const auto r = run_cli("nevanlinna --map 'mobius lambda=0.2' --angular 64");
    REQUIRE(r.code == 0);
    CHECK_THAT(r.out, ContainsSubstring("r,theta,value"));
}

TEST_CASE("config file supplies defaults that flags override") {
    {
        std::ofstream cfg("cli_cfg.tmp", std::ios::trunc);
        cfg << "map=\"affine a=0.5 b=0\"\norder=2\n";
    }
    const auto from_cfg = run_cli("analyze --config cli_cfg.tmp");
    REQUIRE(from_cfg.code == 0);
    CHECK_THAT(from_cfg.out, ContainsSubstring("meta,,order,,2,"));
    const auto overridden = run_cli("analyze --config cli_cfg.tmp --order 1");
    REQUIRE(overridden.code == 0);
    CHECK_THAT(overridden.out, ContainsSubstring("meta,,order,,1,"));
}

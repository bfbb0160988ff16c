// End-to-end checks of the command-line tool: exit codes are the machine
// contract, JSON output round-trips.

#include "qtriple/report_json.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <functional>
#include <string>

namespace {

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(QTRIPLE_BIN) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string output;
    std::array<char, 4096> buf;
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe))
        output.append(buf.data(), n);
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), output};
}

} // namespace

TEST_CASE("verify: equal identity exits 0, discrepancy exits 1, parse error exits 2") {
    const auto ok = run("verify --lhs \"(q;q)_inf*(-q/z;q)_inf*(-z;q)_inf\" --rhs \"theta()\" "
                        "--order 30");
    CHECK(ok.exit_code == 0);
    CHECK(ok.output.find("equal") != std::string::npos);

    const auto bad = run("verify --lhs \"theta()\" --rhs \"theta() + q^5\" --order 12");
    CHECK(bad.exit_code == 1);
    CHECK(bad.output.find("DISCREPANCY") != std::string::npos);

    const auto err = run("verify --lhs \"(a;q)_2\" --rhs \"theta()\" --order 8");
    CHECK(err.exit_code == 2);
    CHECK(err.output.find("unknown identifier") != std::string::npos);
    CHECK(err.output.find("^") != std::string::npos); // position caret
}

TEST_CASE("expand: pentagonal coefficients at order 12") {
    const auto r = run("expand --expr \"(q;q)_inf\" --order 12 --format csv");
    CHECK(r.exit_code == 0);
    // Dense q-coefficients 1,-1,-1,0,0,1,0,1,0,0,0,0,-1: nonzero rows only.
    CHECK(r.output.find("0,0,1") != std::string::npos);
    CHECK(r.output.find("1,0,-1") != std::string::npos);
    CHECK(r.output.find("2,0,-1") != std::string::npos);
    CHECK(r.output.find("5,0,1") != std::string::npos);
    CHECK(r.output.find("7,0,1") != std::string::npos);
    CHECK(r.output.find("12,0,-1") != std::string::npos);
    CHECK(r.output.find("3,0,") == std::string::npos); // zero rows are absent
}

TEST_CASE("verify --format json: report round-trips") {
    const auto r = run("verify --lhs \"E()\" --rhs \"(-z;q)_inf\" --order 16 --format json");
    CHECK(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.output);
    CHECK(j.at("command") == "verify");
    const auto report = j.get<qtriple::VerificationReport>();
    CHECK(report.equal);
    CHECK(report.target_order == 16);
    const nlohmann::json again = report;
    CHECK(again.get<qtriple::VerificationReport>() == report);
}

TEST_CASE("chain --format json over a small range") {
    const auto r = run("chain --m 0..1 --order 10 --format json --jobs 2");
    CHECK(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.output);
    CHECK(j.at("pass") == true);
    const auto reports = j.at("results").get<std::vector<qtriple::ChainReport>>();
    REQUIRE(reports.size() == 2);
    CHECK(reports[0].m == 0);
    CHECK(reports[1].m == 1);
    for (const auto& cr : reports) {
        CHECK(cr.pass);
        CHECK(cr.edges.size() == 5);
        const nlohmann::json again = cr;
        CHECK(again.get<qtriple::ChainReport>() == cr);
    }
}

TEST_CASE("chain output is identical regardless of --jobs") {
    auto strip_times = [](nlohmann::json& j) {
        std::function<void(nlohmann::json&)> walk = [&](nlohmann::json& node) {
            if (node.is_object()) {
                node.erase("wall_seconds");
                for (auto& [k, v] : node.items()) walk(v);
            } else if (node.is_array()) {
                for (auto& v : node) walk(v);
            }
        };
        walk(j);
    };
    const auto serial = run("chain --m 0..3 --order 12 --format json --jobs 1");
    const auto parallel = run("chain --m 0..3 --order 12 --format json --jobs 4");
    CHECK(serial.exit_code == 0);
    CHECK(parallel.exit_code == 0);
    auto a = nlohmann::json::parse(serial.output);
    auto b = nlohmann::json::parse(parallel.output);
    strip_times(a);
    strip_times(b);
    CHECK(a == b);
}

TEST_CASE("eval and converge") {
    const auto e = run("eval --q 0.5 --z 1.0");
    CHECK(e.exit_code == 0);

    const auto far = run("eval --q 1.5 --z 1.0");
    CHECK(far.exit_code == 2); // |q| >= 1 rejected

    const auto c = run("converge --q 0.3 --z 2.0 --m 0..6 --format csv");
    CHECK(c.exit_code == 0);
    CHECK(c.output.find("m,residual,factor_count,term_count") != std::string::npos);
    CHECK(c.output.find("\n0,") != std::string::npos);
    CHECK(c.output.find("\n6,") != std::string::npos);
}

TEST_CASE("environment default order is honored") {
    const auto r = run("expand --expr \"q^9\" --format csv"); // default order 24 keeps q^9
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("9,0,1") != std::string::npos);

    FILE* pipe = popen((std::string("QTRIPLE_DEFAULT_ORDER=4 ") + QTRIPLE_BIN +
                        " expand --expr \"q^9\" --format csv 2>&1")
                           .c_str(),
                       "r");
    REQUIRE(pipe != nullptr);
    std::string output;
    std::array<char, 4096> buf;
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) output.append(buf.data(), n);
    pclose(pipe);
    CHECK(output.find("9,0,1") == std::string::npos); // q^9 truncated away at order 4
}

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "subring/cli.hpp"

namespace {

struct RunResult {
    int code;
    std::string out;
    std::string err;
    std::vector<nlohmann::json> lines;
};

RunResult run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = subring::cli::run(args, out, err);
    RunResult result{code, out.str(), err.str(), {}};
    std::istringstream in(result.out);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] == '{') result.lines.push_back(nlohmann::json::parse(line));
    return result;
}

}  // namespace

TEST_CASE("g-alpha emits one count record") {
    const auto r = run_cli({"g-alpha", "--alpha", "3,2", "--prime", "7"});
    REQUIRE(r.code == 0);
    REQUIRE(r.lines.size() == 1);
    CHECK(r.lines[0]["kind"] == "g_alpha");
    CHECK(r.lines[0]["count"] == "7");
    CHECK(r.lines[0]["prime"] == 7);
    CHECK(r.lines[0]["params"]["alpha"] == "3,2");
    CHECK(r.lines[0].contains("elapsed_ms"));
}

TEST_CASE("subgroups formula and direct methods agree") {
    const auto formula =
        run_cli({"subgroups", "--n", "2", "--e", "1", "--prime", "7", "--method", "formula"});
    REQUIRE(formula.code == 0);
    CHECK(formula.lines[0]["count"] == "8");
    for (std::string n : {"2", "3", "4"})
        for (std::string e : {"0", "2", "4"}) {
            const auto a = run_cli({"subgroups", "--n", n, "--e", e, "--primes", "2,5",
                                    "--method", "formula"});
            const auto b = run_cli({"subgroups", "--n", n, "--e", e, "--primes", "2,5",
                                    "--method", "direct"});
            REQUIRE(a.lines.size() == 2);
            for (size_t i = 0; i < 2; ++i) CHECK(a.lines[i]["count"] == b.lines[i]["count"]);
        }
}

TEST_CASE("f-n methods agree and report their method") {
    const auto rec = run_cli({"f-n", "--n", "3", "--e", "2", "--prime", "3"});
    const auto dir =
        run_cli({"f-n", "--n", "3", "--e", "2", "--prime", "3", "--method", "direct"});
    REQUIRE(rec.code == 0);
    REQUIRE(dir.code == 0);
    CHECK(rec.lines[0]["count"] == dir.lines[0]["count"]);
    CHECK(rec.lines[0]["params"]["method"] == "recurrence");
    CHECK(dir.lines[0]["params"]["method"] == "direct");
}

TEST_CASE("formula subcommand") {
    const auto r = run_cli({"formula", "--name", "g_basic_n", "--n", "3", "--prime", "3"});
    REQUIRE(r.code == 0);
    CHECK(r.lines[0]["count"] == "4");
    CHECK(run_cli({"formula", "--name", "bogus", "--prime", "3"}).code == 2);
}

TEST_CASE("zeta subcommand emits one line per exponent") {
    const auto r = run_cli({"zeta", "--n", "2", "--prime", "5", "--max-e", "6"});
    REQUIRE(r.code == 0);
    REQUIRE(r.lines.size() == 7);
    for (const auto& line : r.lines) CHECK(line["count"] == "1");
}

TEST_CASE("variety subcommand: builtin and document") {
    const auto builtin = run_cli({"variety", "--system", "builtin:qp-pair", "--prime", "3"});
    REQUIRE(builtin.code == 0);
    CHECK(builtin.lines[0]["count"] == "35");

    const std::string path = "cli_test_poly.json";
    {
        std::ofstream f(path);
        f << R"({"vars": ["x", "y"], "polys": [[[1, [1, 1]], [-1, [0, 0]]]]})";
    }
    const auto doc = run_cli({"variety", "--poly-file", path, "--prime", "7"});
    CHECK(doc.code == 0);
    CHECK(doc.lines[0]["count"] == "6");
    std::remove(path.c_str());

    CHECK(run_cli({"variety", "--poly-file", "missing.json", "--prime", "7"}).code == 2);
    CHECK(run_cli({"variety", "--prime", "7"}).code == 2);
}

TEST_CASE("subset census with pins reproduces the diagnostic count") {
    const auto r = run_cli({"subset-census", "--alpha", "2,3,2,2", "--pin", "1:2=0",
                            "--prime", "3"});
    REQUIRE(r.code == 0);
    CHECK(r.lines[0]["count"] == "135");
    CHECK(r.lines[0]["kind"] == "subset_census");

    const auto pairs = run_cli({"subset-census", "--alpha", "3,2,2", "--pairs", "3:3",
                                "--prime", "3"});
    REQUIRE(pairs.code == 0);
    CHECK(pairs.lines[0]["params"]["pairs"] == "3:3");
}

TEST_CASE("fit reports sampled counts then a verdict line") {
    const auto r = run_cli({"fit", "--target", "subgroups", "--n", "2", "--e", "1",
                            "--primes", "first:6"});
    REQUIRE(r.code == 0);
    REQUIRE(r.lines.size() == 7);
    const auto& verdict = r.lines.back();
    CHECK(verdict["kind"] == "fit");
    CHECK(verdict["verdict"] == "polynomial");
    CHECK(verdict["params"]["polynomial"] == "1*p + 1");
    CHECK(verdict["params"]["scope"] == "empirical at the sampled primes");

    const auto qp = run_cli({"fit", "--target", "variety", "--system", "builtin:qp-pair",
                             "--primes", "2,3,5,7,11,13"});
    REQUIRE(qp.code == 0);
    CHECK(qp.lines.back()["verdict"] == "quasipolynomial");
    CHECK(qp.lines.back()["params"]["modulus"] == 2);
}

TEST_CASE("verify basic suite passes on a small grid") {
    const auto r = run_cli({"verify", "--suite", "basic", "--primes", "2,3", "--max-n", "4"});
    CHECK(r.code == 0);
    CHECK(r.lines.size() > 10);
    for (const auto& line : r.lines) {
        CHECK(line["kind"] == "verify");
        CHECK(line["verdict"] == "pass");
    }
}

TEST_CASE("verify reports the known index n+2 mismatch and exits 1") {
    const auto r = run_cli({"verify", "--suite", "lemmas", "--max-n", "4", "--primes", "2"});
    CHECK(r.code == 1);
    bool found = false;
    for (const auto& line : r.lines)
        if (line["verdict"] == "fail") {
            found = true;
            CHECK(line["params"]["check"] == "g_n_plus_2");
            CHECK(line["params"]["expected"] == "66");
            CHECK(line["params"]["actual"] == "67");
        }
    CHECK(found);
}

TEST_CASE("verify respects a zero-second budget by skipping") {
    const auto r = run_cli({"verify", "--suite", "zeta", "--primes", "2",
                            "--budget-seconds", "0.000001"});
    CHECK(r.code == 0);
    bool any_skipped = false;
    for (const auto& line : r.lines) any_skipped = any_skipped || line["verdict"] == "skipped";
    CHECK(any_skipped);
}

TEST_CASE("exit codes: usage and budget") {
    CHECK(run_cli({"no-such-command"}).code == 2);
    CHECK(run_cli({"g-alpha"}).code == 2);
    CHECK(run_cli({"g-alpha", "--alpha", "3,2"}).code == 2);  // no prime
    CHECK(run_cli({"g-alpha", "--alpha", "3,2", "--prime", "6"}).code == 2);
    const auto budget = run_cli({"g-alpha", "--alpha", "4,4,4", "--prime", "13",
                                 "--budget", "100"});
    CHECK(budget.code == 3);
    CHECK(budget.err.find("exceeds budget") != std::string::npos);
}

TEST_CASE("csv output carries a header and one row per record") {
    const auto r = run_cli({"--format", "csv", "zeta", "--n", "3", "--prime", "2",
                            "--max-e", "2"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(in, line)) rows.push_back(line);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == "kind,params,prime,count,verdict,elapsed_ms");
    CHECK(rows[1].find("zeta") == 0);
}

TEST_CASE("thread count does not change counts") {
    const auto one = run_cli({"--threads", "1", "g-alpha", "--alpha", "3,2,2", "--prime", "3"});
    const auto many = run_cli({"--threads", "7", "g-alpha", "--alpha", "3,2,2", "--prime", "3"});
    CHECK(one.lines[0]["count"] == many.lines[0]["count"]);
}

TEST_CASE("help exits cleanly") {
    CHECK(run_cli({"--help"}).code == 0);
}

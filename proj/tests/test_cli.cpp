#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "treepde/config.hpp"
#include "treepde/errors.hpp"

using namespace treepde;

namespace {

int run(const std::string& args) {
    std::string cmd = std::string(TREEPDE_BIN) + " " + args + " > cli_stdout.txt 2> cli_stderr.txt";
    int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream is(path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config text and keys") {
    auto kv = parse_config_text("# c\n[mc]\nn = 500 # trailing\nstrategy=A\n\n[point]\nt = 0.25\n");
    CHECK(kv.at("mc.n") == "500");
    CHECK(kv.at("mc.strategy") == "A");
    RunConfig rc;
    for (const auto& [k, v] : kv) rc.set(k, v);
    CHECK(rc.N == 500);
    CHECK(rc.strategy == Strategy::A);
    CHECK(rc.t == 0.25);
    CHECK_THROWS_AS(rc.set("mc.bogus", "1"), ConfigError);
    CHECK_THROWS_AS(rc.set("mc.n", "many"), ConfigError);

    RunConfig a, b;
    a.workers = 1;
    b.workers = 8;
    CHECK(a.hash() == b.hash());
    b.seed = 2;
    CHECK(a.hash() != b.hash());
}

TEST_CASE("solve-point is reproducible and writes a hashed CSV") {
    const std::string args = "solve-point --problem ex1 --x 0 --t 0.5 --strategy B --n 20000 --seed 7";
    REQUIRE(run(args + " --out cli_a.csv") == 0);
    REQUIRE(run(args + " --out cli_b.csv") == 0);
    const std::string a = slurp("cli_a.csv");
    CHECK(a == slurp("cli_b.csv"));
    CHECK(a.rfind("# config_hash=", 0) == 0);
    CHECK(slurp("cli_stdout.txt").find("value=") != std::string::npos);
    std::filesystem::remove("cli_a.csv");
    std::filesystem::remove("cli_b.csv");
}

TEST_CASE("exit codes and cleanup") {
    for (const char* f : {"cli_bad.csv", "cli_pole.csv", "cli_fail.csv", "cli_fail.csv.timing.csv"})
        std::filesystem::remove(f);
    CHECK(run("solve-point --problem ex1 --bogus-flag 1") == 2);
    CHECK(run("solve-point --problem nope") == 2);
    CHECK(run("frobnicate") == 2);
    CHECK(run("solve-point --problem ex1 --q 0.2 --out cli_bad.csv") == 2);
    CHECK_FALSE(std::filesystem::exists("cli_bad.csv"));
    // A pole at z = 1 is a numerical failure.
    CHECK(run("pade-sum --coeffs 1,1,1 --pade 0/1 --out cli_pole.csv") == 3);
    CHECK_FALSE(std::filesystem::exists("cli_pole.csv"));
    CHECK(run("solve-pdd --problem ex1 --subdomains 2 --n 50 --fault-rate 0.97 --t 0.1 --dx 0.5 "
              "--out cli_fail.csv") == 3);
    CHECK_FALSE(std::filesystem::exists("cli_fail.csv"));
    CHECK_FALSE(std::filesystem::exists("cli_fail.csv.timing.csv"));
}

TEST_CASE("pade-sum and tree-stats") {
    REQUIRE(run("pade-sum --coeffs 1,1,0.5,0.16666666666666666,0.041666666666666664") == 0);
    CHECK(slurp("cli_stdout.txt").find("value=2.71428571428") != std::string::npos);

    REQUIRE(run("tree-stats --m 2 --q 0.6666667 --n 100000 --t 1 --out cli_trees.csv") == 0);
    const std::string csv = slurp("cli_trees.csv");
    CHECK(csv.find("Ne,k,analytic_P,empirical_P,stderr") != std::string::npos);
    const std::string out = slurp("cli_stdout.txt");
    auto pos = out.find("mean_k=");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(out.substr(pos + 7)) == doctest::Approx(2.0).epsilon(0.05));
    std::filesystem::remove("cli_trees.csv");
}

TEST_CASE("solve-pdd outputs and compare") {
    const std::string cfg_path = "cli_run.cfg";
    std::ofstream(cfg_path) << "[problem]\nid = ex3\n[grid]\nx_lo = -10\nx_hi = 10\ndx = 0.25\n"
                               "dt = 0.01\n[point]\nt = 0.25\n[mc]\nn = 2000\n[pdd]\nsubdomains = 2\n";
    REQUIRE(run("solve-pdd --config " + cfg_path + " --out cli_pdd.csv") == 0);
    CHECK(slurp("cli_pdd.csv.timing.csv").find("T_MC,") != std::string::npos);
    CHECK(slurp("cli_pdd.csv.interfaces.csv").find("interface,y,t,value,stderr") != std::string::npos);
    REQUIRE(run("solve-reference --config " + cfg_path + " --out cli_ref.bin") == 0);
    CHECK(std::filesystem::file_size("cli_ref.bin") == 64 + 81 * 8);
    REQUIRE(run("compare --config " + cfg_path + " --out cli_cmp.csv") == 0);
    const std::string out = slurp("cli_stdout.txt");
    auto pos = out.find("max_discrepancy=");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(out.substr(pos + 16)) < 5e-2);
    for (const char* f : {"cli_pdd.csv", "cli_pdd.csv.timing.csv", "cli_pdd.csv.interfaces.csv",
                          "cli_ref.bin", "cli_cmp.csv", "cli_run.cfg", "cli_stdout.txt",
                          "cli_stderr.txt"})
        std::filesystem::remove(f);
}

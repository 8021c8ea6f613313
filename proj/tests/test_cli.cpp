#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef MRGARK_CLI_PATH
#define MRGARK_CLI_PATH "mrgark"
#endif

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path dir = fs::temp_directory_path() / "mrgark_cli_tests";
    fs::create_directories(dir);
    const fs::path out = dir / ("out" + std::to_string(counter) + ".txt");
    const fs::path err = dir / ("err" + std::to_string(counter) + ".txt");
    ++counter;
    const std::string cmd = std::string(MRGARK_CLI_PATH) + " " + args + " > " +
                            out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

fs::path temp_file(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "mrgark_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("check on a catalog scheme reports and exits zero") {
    const RunResult r = run_cli("check --scheme mrk-radau1a-3 --M 2");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("order: 3") != std::string::npos);
    CHECK(r.out.find("internally consistent: yes") != std::string::npos);
    CHECK(r.out.find("stability-decoupled: no") != std::string::npos);
}

TEST_CASE("unknown schemes exit with code 2 and machine-readable error") {
    const RunResult r = run_cli("check --scheme nosuch");
    CHECK(r.exit_code == 2);
    const auto err = nlohmann::json::parse(r.err);
    CHECK(err.at("code").get<std::string>() == "UnknownScheme");
}

TEST_CASE("unknown problems exit with code 2") {
    const RunResult r =
        run_cli("converge --scheme add-stable-2 --M 2 --problem bogus --H 0.1,0.05,0.025");
    CHECK(r.exit_code == 2);
    const auto err = nlohmann::json::parse(r.err);
    CHECK(err.at("code").get<std::string>() == "UnknownProblem");
}

TEST_CASE("converge writes one CSV row per step size and prints the slope") {
    const fs::path csv = temp_file("converge.csv");
    const RunResult r = run_cli("converge --scheme add-stable-2 --M 2 --problem linear2 "
                                "--H 0.1,0.05,0.025,0.0125 --out " + csv.string());
    CHECK(r.exit_code == 0);
    const std::string table = slurp(csv);
    CHECK(table.rfind("H,error\n", 0) == 0);
    CHECK(std::count(table.begin(), table.end(), '\n') == 5);
    CHECK(r.out.find("slope:") != std::string::npos);

    const double slope = std::stod(r.out.substr(r.out.find("slope:") + 6));
    CHECK(slope > 1.8);
    CHECK(slope < 2.2);
}

TEST_CASE("converge enforces an expected slope when asked") {
    const RunResult r = run_cli("converge --scheme add-stable-2 --M 2 --problem linear2 "
                                "--H 0.1,0.05,0.025 --expect-slope 3.0 --slope-tol 0.1");
    CHECK(r.exit_code == 1);
}

TEST_CASE("checked schemes can be dumped and re-checked identically") {
    const fs::path dump = temp_file("scheme.json");
    const fs::path rep1 = temp_file("report1.json");
    const fs::path rep2 = temp_file("report2.json");

    const RunResult first = run_cli("check --scheme mrk-radau1a-3 --M 2 --format json --out " +
                                    rep1.string() + " --dump " + dump.string());
    CHECK(first.exit_code == 0);
    const RunResult second =
        run_cli("check --scheme " + dump.string() + " --format json --out " + rep2.string());
    CHECK(second.exit_code == 0);

    auto a = nlohmann::json::parse(slurp(rep1));
    auto b = nlohmann::json::parse(slurp(rep2));
    // File-based schemes carry no catalog expectations; compare the analysis.
    a.erase("scheme");
    b.erase("scheme");
    a.erase("expected_order");
    a.erase("order_matches_expected");
    a.erase("note");
    CHECK(a == b);
}

TEST_CASE("stability subcommand prints verdicts and eigenvalues") {
    const RunResult r = run_cli("stability add-stable-2 --M 3");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("algebraically stable: yes") != std::string::npos);
    CHECK(r.out.find("min eigenvalue") != std::string::npos);
    CHECK(r.out.find("stability-decoupled: yes") != std::string::npos);
}

TEST_CASE("monotonicity subcommand prints radius, verdicts and the step bound") {
    const RunResult r = run_cli("monotonicity ssp2-mr-lastslow --M 2 --rho 1.0");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("radius: 0.27") != std::string::npos);
    CHECK(r.out.find("incidence 5.7a: pass") != std::string::npos);
    CHECK(r.out.find("step bound") != std::string::npos);

    const RunResult bad = run_cli("monotonicity ssp2-mr-decoupled --M 2");
    CHECK(bad.exit_code == 0);
    CHECK(bad.out.find("radius: 0") != std::string::npos);
    CHECK(bad.out.find("negative entries") != std::string::npos);
}

TEST_CASE("integrate emits a CSV trajectory") {
    const fs::path csv = temp_file("traj.csv");
    const RunResult r = run_cli(
        "integrate --scheme ssp2-mr-lastslow --M 2 --problem linear2 --H 0.1 --t-end 0.5 "
        "--out " + csv.string());
    CHECK(r.exit_code == 0);
    const std::string table = slurp(csv);
    CHECK(table.rfind("t,y0,y1\n", 0) == 0);
    CHECK(std::count(table.begin(), table.end(), '\n') == 7);
}

TEST_CASE("MRGARK_TOL loosens the condition tolerance") {
    // With an absurdly loose tolerance every condition is satisfied, so the
    // reported order saturates at 3 for a dumped (expectation-free) scheme.
    const fs::path dump = temp_file("ssp2.json");
    run_cli("check --scheme ssp2-mr-lastslow --M 2 --format json --out /dev/null --dump " +
            dump.string());
    const RunResult strict = run_cli("check --scheme " + dump.string() + " --format json");
    const auto strict_json = nlohmann::json::parse(strict.out);
    CHECK(strict_json["order"]["classified_order"].get<int>() == 2);

    const std::string cmd = "MRGARK_TOL=10 " + std::string(MRGARK_CLI_PATH) +
                            " check --scheme " + dump.string() + " --format json";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[512];
    while (fgets(buf, sizeof buf, pipe)) out += buf;
    pclose(pipe);
    const auto loose_json = nlohmann::json::parse(out);
    CHECK(loose_json["order"]["classified_order"].get<int>() == 3);
}

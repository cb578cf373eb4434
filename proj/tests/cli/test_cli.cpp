#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path& workdir() {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / "perpetuity_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

void put(const std::string& name, const std::string& text) {
    std::ofstream(workdir() / name, std::ios::binary) << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int perpetuity(const std::string& args) {
    const std::string cmd = "cd '" + workdir().string() + "' && '" PERPETUITY_BIN "' " + args +
                            " > last.out 2> last.err";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

// the single run-* directory below root
fs::path run_dir(const std::string& root) {
    fs::path found;
    for (const auto& e : fs::directory_iterator(workdir() / root))
        if (e.path().filename().string().rfind("run-", 0) == 0) {
            CHECK(found.empty());
            found = e.path();
        }
    REQUIRE_FALSE(found.empty());
    return found;
}

}  // namespace

TEST_CASE("diagnose exit codes") {
    put("half.cfg", "rho.atoms=0.5:1\n");
    CHECK(perpetuity("-c half.cfg -o diag diagnose") == 0);
    CHECK(slurp(workdir() / "last.out").find("EntireCharacteristicFunction") != std::string::npos);
    const auto report = json::parse(slurp(run_dir("diag") / "diagnostics.json"));
    CHECK(report["tail_class"] == "EntireCharacteristicFunction");

    put("two.cfg", "rho.atoms=2:1\n");
    CHECK(perpetuity("-c two.cfg -o diag2 diagnose") == 2);

    put("neg.csv", "location,weight\n0.5,1.5\n1.5,-0.5\n");
    put("neg.cfg", "rho.csv=neg.csv\n");
    CHECK(perpetuity("-c neg.cfg diagnose") == 1);
    CHECK(slurp(workdir() / "last.err").find("neg.csv:3") != std::string::npos);

    put("bad.cfg", "rho.atoms=0.5:1\nsolver.tol=abc\n");
    CHECK(perpetuity("-c bad.cfg diagnose") == 1);
    const auto err = slurp(workdir() / "last.err");
    CHECK(err.find("bad.cfg:2") != std::string::npos);
    CHECK(err.find("solver.tol") != std::string::npos);

    CHECK(perpetuity("diagnose") == 1);
    CHECK(perpetuity("-c half.cfg frobnicate") == 1);
}

TEST_CASE("flags win over the config file") {
    put("over.cfg", "rho.atoms=2:1\n");
    CHECK(perpetuity("-c over.cfg --set rho.atoms=0.5:1 -o over diagnose") == 0);
}

TEST_CASE("solve hits the iteration cap") {
    put("half.cfg", "rho.atoms=0.5:1\n");
    CHECK(perpetuity("-c half.cfg -s solver.max_iter=1 -o cap solve --method lst") == 3);
    const auto report = json::parse(slurp(run_dir("cap") / "solve_report.json"));
    CHECK(report["lst"]["converged"] == false);
    CHECK(report["exit_code"] == 3);
}

TEST_CASE("solve lst on the half point mass") {
    put("half.cfg", "rho.atoms=0.5:1\n");
    CHECK(perpetuity("-c half.cfg -o lst solve --method lst") == 0);
    const auto report = json::parse(slurp(run_dir("lst") / "solve_report.json"));
    CHECK(report["lst"]["residual"].get<double>() < 1e-10);
    CHECK(report["lst"]["atom_at_zero"].get<double>() == doctest::Approx(0.20319).epsilon(5e-4));
}

TEST_CASE("sampling without a seed is refused") {
    put("half.cfg", "rho.atoms=0.5:1\n");
    CHECK(perpetuity("-c half.cfg solve --method mc") == 1);
    CHECK(slurp(workdir() / "last.err").find("mc.seed") != std::string::npos);
}

TEST_CASE("solve both, rerun, verify") {
    put("uni.cfg",
        "rho.family=uniform01\nrho.n=512\nmc.n=20000\nmc.iterations=20\nmc.seed=7\n"
        "metric.pairs=2\nmetric.samples=2000\nverify.steutel_tol=2e-2\n");
    CHECK(perpetuity("-c uni.cfg -o both solve --method both") == 0);
    const fs::path dir = run_dir("both");
    const auto report = json::parse(slurp(dir / "solve_report.json"));
    CHECK(report["cross_check"]["pass"] == true);
    CHECK(fs::exists(dir / "lst_grid.csv"));
    CHECK(fs::exists(dir / "mc_sample.csv"));

    const auto manifest = slurp(dir / "manifest.json");
    const auto sample = slurp(dir / "mc_sample.csv");
    fs::remove_all(workdir() / "both");
    CHECK(perpetuity("-c uni.cfg -o both solve --method both") == 0);
    CHECK(slurp(dir / "manifest.json") == manifest);
    CHECK(slurp(dir / "mc_sample.csv") == sample);
    for (const auto& entry : json::parse(manifest)) CHECK(fs::exists(dir / entry["path"].get<std::string>()));

    CHECK(perpetuity("-c uni.cfg -o both moments") == 0);
    CHECK(slurp(dir / "moments_family.csv").find("720") != std::string::npos);

    CHECK(perpetuity("-c uni.cfg -o both verify --from-artifacts") == 0);
    const auto verdict = json::parse(slurp(dir / "verify.json"));
    CHECK(verdict["exit_code"] == 0);

    CHECK(perpetuity("-c uni.cfg -o both verify --negative-control --from-artifacts") == 4);
    CHECK(fs::exists(dir / "verify_negative_control.json"));

    // shuffle the values and drop one row
    std::stringstream in(sample);
    std::string header, line;
    std::getline(in, header);
    std::vector<std::string> rows;
    while (std::getline(in, line)) rows.push_back(line);
    std::reverse(rows.begin(), rows.end());
    rows.pop_back();
    std::string corrupted = header + "\n";
    for (const auto& r : rows) corrupted += r + "\n";
    std::ofstream(dir / "mc_sample.csv", std::ios::binary) << corrupted;
    CHECK(perpetuity("-c uni.cfg -o both verify --from-artifacts") == 1);
    CHECK(slurp(workdir() / "last.err").find("mc_sample.csv") != std::string::npos);
}

TEST_CASE("verify without artifacts") {
    put("fresh.cfg", "rho.atoms=0.5:1\nmc.n=5000\nmc.seed=3\n");
    CHECK(perpetuity("-c fresh.cfg -o fresh verify --from-artifacts") == 1);
    CHECK(perpetuity("-c fresh.cfg -o fresh -s mc.n=10 verify") == 1);
}

TEST_CASE("response and metric") {
    put("mix.cfg", "rho.atoms=0.5:0.8,1.5:0.2\nmodel.lambda=2\n");
    CHECK(perpetuity("-c mix.cfg -o resp response") == 0);
    CHECK(slurp(run_dir("resp") / "response_curve.csv").rfind("u,h\n", 0) == 0);

    CHECK(perpetuity("-c mix.cfg -o met --seed 11 -s metric.pairs=2 -s metric.samples=2000 metric --q 1.5") == 0);
    const auto report = json::parse(slurp(run_dir("met") / "metric_report.json"));
    CHECK(report.contains("max_ratio"));
    CHECK(perpetuity("-c mix.cfg -o met --seed 11 metric --q 2.5") == 1);
}

#include <doctest.h>

#include <string>

#include "config.hpp"

using namespace perpetuity;
using namespace perpetuity::cli;

namespace {

RunConfig from_text(const std::string& text, const Entries& overrides = {}) {
    return build_config(parse_config_text(text, "test.cfg"), overrides);
}

std::string error_of(const std::string& text, const Entries& overrides = {}) {
    try {
        (void)from_text(text, overrides);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("defaults") {
    const auto cfg = from_text("rho.atoms=0.5:1\n");
    CHECK(cfg.rho.atoms == point_mass(0.5));
    CHECK(cfg.m == 1.0);
    CHECK(cfg.solver.grid_size == 256);
    CHECK(cfg.solver.tol == 1e-13);
    CHECK(cfg.mc.n_samples == 200000);
    CHECK(cfg.mc.chunk_size == 8192);
    CHECK_FALSE(cfg.has_seed);
    CHECK(cfg.q == 1.5);
    for (const auto& [key, value] : default_values()) CHECK(cfg.effective.contains(key));
}

TEST_CASE("rho sources") {
    CHECK(from_text("rho.atoms = 0.5:0.8, 1.5:0.2\n").rho.atoms == validate({{0.5, 0.8}, {1.5, 0.2}}));
    const auto fam = from_text("rho.family=uniform01\nrho.n=4\n");
    CHECK(fam.rho.family == Family::uniform01);
    CHECK(fam.rho.atoms.size() == 4);
    const auto table = from_text("rho.family=quantile_table\nrho.quantiles=0.2,0.4,0.4\n");
    CHECK(table.rho.atoms.size() == 2);
    CHECK(error_of("") != "");
    CHECK(error_of("rho.atoms=0.5:1\nrho.family=uniform01\n").find("exactly one") != std::string::npos);
}

TEST_CASE("comments and blank lines") {
    const auto cfg = from_text("# comment\n\nrho.atoms=0.5:1\n  solver.tol = 1e-12  \n");
    CHECK(cfg.solver.tol == 1e-12);
}

TEST_CASE("flags win over the file") {
    const auto cfg = from_text("rho.atoms=0.5:1\nsolver.tol=1e-12\n", {{"solver.tol", "1e-9", "--set"}});
    CHECK(cfg.solver.tol == 1e-9);
}

TEST_CASE("errors carry line and field") {
    const auto e1 = error_of("rho.atoms=0.5:1\nsolver.tol=abc\n");
    CHECK(e1.find("test.cfg:2") != std::string::npos);
    CHECK(e1.find("solver.tol") != std::string::npos);
    CHECK(error_of("rho.atoms=0.5:1\nsolver.bogus=1\n").find("test.cfg:2") != std::string::npos);
    CHECK(error_of("rho.atoms=0.5:1\nno equals sign\n").find("test.cfg:2") != std::string::npos);
    CHECK(error_of("rho.atoms=0.5:-1\n").find("rho.atoms") != std::string::npos);
    CHECK(error_of("rho.atoms=0:1\n") != "");
    CHECK(error_of("rho.atoms=0.5:1\nmetric.q=2.5\n").find("metric.q") != std::string::npos);
    CHECK(error_of("rho.atoms=0.5:1\nmc.n=0\n") != "");
    CHECK(error_of("rho.atoms=0.5:1\nmc.seed=-3\n") != "");
    CHECK(error_of("rho.family=gamma\n").find("gamma") != std::string::npos);
}

TEST_CASE("seed is required for sampling") {
    const auto cfg = from_text("rho.atoms=0.5:1\n");
    CHECK_THROWS_AS(cfg.require_seed("solve"), ConfigError);
    const auto seeded = from_text("rho.atoms=0.5:1\nmc.seed=0\n");
    CHECK(seeded.has_seed);
    CHECK_NOTHROW(seeded.require_seed("solve"));
}

TEST_CASE("run directory hash") {
    const auto a = from_text("rho.atoms=0.5:1\nmc.seed=1\n");
    const auto b = from_text("mc.seed=1\nrho.atoms = 0.5:1\noutput.dir=elsewhere\nmc.threads=4\n");
    CHECK(a.hash() == b.hash());
    CHECK(a.hash().size() == 16);
    const auto c = from_text("rho.atoms=0.5:1\nmc.seed=2\n");
    CHECK(a.hash() != c.hash());
    // the law, not its spelling, enters the hash
    const auto d = from_text("rho.atoms=0.5:0.5,0.5:0.5\nmc.seed=1\n");
    CHECK(a.hash() == d.hash());
    CHECK(a.run_directory().filename().string() == "run-" + a.hash());
}

}

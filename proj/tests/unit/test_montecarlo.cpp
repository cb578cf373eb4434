#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "perpetuity/diagnostics.hpp"
#include "perpetuity/lst_solver.hpp"
#include "perpetuity/montecarlo.hpp"
#include "perpetuity/numeric.hpp"
#include "perpetuity/stats.hpp"

using namespace perpetuity;

namespace {

double mean_of(const std::vector<double>& v) { return sample_mean(v); }

double exp_cdf(double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); }

}  // namespace

TEST_SUITE("montecarlo") {

TEST_CASE("empty response gives zeros") {
    const EmpiricalSample theta({1.0, 2.0, 3.0}, 1, "t");
    const auto out = shot_noise_resample(theta, ResponseFunction({}, 1.0), 5, 100);
    CHECK(out.size() == 100);
    for (double v : out.values()) CHECK(v == 0.0);
}

TEST_CASE("unit kernel on unit marks is Poisson(1)") {
    const std::size_t n = 200000;
    const EmpiricalSample ones(std::vector<double>(10, 1.0), 1, "ones");
    const auto out = shot_noise_resample(ones, ResponseFunction({{1.0, 1.0}}, 1.0), 17, n);
    const double mu = mean_of(out.values());
    const double var = sample_variance(out.values());
    CHECK(std::abs(mu - 1.0) < 4.0 * std::sqrt(1.0 / n));
    // Var of the sample variance for Poisson(1) is about (mu4 - 1)/n with mu4 = 4
    CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(3.0 / n));
    for (double v : out.values()) CHECK(v == std::floor(v));
}

TEST_CASE("one transform preserves the mean") {
    oracle::TestRng rng(61);
    for (int t = 0; t < 5; ++t) {
        const auto rho = oracle::random_rho(rng, 4);
        const auto h = response_from_rho(rho, 1.0);
        const EmpiricalSample theta(oracle::exponential_sample(100 + t, 50000, 2.0), 1, "theta");
        const auto out = shot_noise_resample(theta, h, 200 + t, 100000);
        const double se = std::sqrt(sample_variance(out.values()) / 100000.0);
        CHECK(std::abs(mean_of(out.values()) - mean_of(theta.values())) < 4.0 * se);
    }
}

TEST_CASE("determinism and chunk layout") {
    const EmpiricalSample theta(oracle::exponential_sample(3, 20000), 1, "theta");
    const auto h = response_from_rho(quantize_family(Family::uniform01, 64), 1.0);
    const auto a = shot_noise_resample(theta, h, 99, 20000, 4096, 1);
    const auto b = shot_noise_resample(theta, h, 99, 20000, 4096, 3);
    CHECK(a.values() == b.values());
    const auto c = shot_noise_resample(theta, h, 99, 20000, 1000, 1);
    CHECK(a.values() != c.values());
    CHECK(ks_two_sample(a.values(), c.values()) < ks_critical_value(0.001, 20000, 20000));
}

TEST_CASE("fixed point does not depend on the thread count") {
    McConfig cfg;
    cfg.n_samples = 20000;
    cfg.n_transform_iterations = 5;
    cfg.chunk_size = 3000;
    cfg.master_seed = 17;
    const auto one = mc_fixed_point(point_mass(0.5), 1.0, cfg).sample;
    cfg.threads = 4;
    CHECK(mc_fixed_point(point_mass(0.5), 1.0, cfg).sample.values() == one.values());
}

TEST_CASE("fixed point for uniform is Exp(1)") {
    McConfig cfg;
    cfg.n_samples = 200000;
    cfg.master_seed = 2024;
    std::size_t checked = 0;
    const auto fp = mc_fixed_point(quantize_family(Family::uniform01, 512), 1.0, cfg,
                                   [&](std::size_t, const EmpiricalSample&) { ++checked; });
    CHECK(checked == cfg.n_transform_iterations);
    CHECK(fp.iterations.size() == cfg.n_transform_iterations);
    for (const auto& it : fp.iterations) CHECK(std::abs(it.raw_mean - 1.0) < 4.0 * it.standard_error);
    CHECK(mean_of(fp.sample.values()) == doctest::Approx(1.0).epsilon(1e-12));

    // two-sample test against an independent Exp(1) draw
    const auto ref = oracle::exponential_sample(77, cfg.n_samples);
    CHECK(ks_two_sample(fp.sample.values(), ref) < ks_critical_value(0.01, cfg.n_samples, cfg.n_samples));
    CHECK(ks_one_sample(fp.sample.values(), exp_cdf) < ks_critical_value(0.01, cfg.n_samples, cfg.n_samples));
}

TEST_CASE("half point mass: zero fraction matches the atom") {
    McConfig cfg;
    cfg.n_samples = 200000;
    cfg.master_seed = 7;
    const auto fp = mc_fixed_point(point_mass(0.5), 1.0, cfg);
    const auto& v = fp.sample.values();
    const double frac = static_cast<double>(std::count_if(v.begin(), v.end(), [](double x) { return x < 1e-9; })) /
                        static_cast<double>(v.size());
    const double c = atom_at_zero(point_mass(0.5));
    CHECK(std::abs(frac - c) < 4.0 * std::sqrt(c * (1.0 - c) / static_cast<double>(v.size())));
}

TEST_CASE("fixed point refuses laws without a solution") {
    McConfig cfg;
    cfg.n_samples = 1000;
    CHECK_THROWS_AS(mc_fixed_point(point_mass(1.0), 1.0, cfg), ExistenceError);
}

TEST_CASE("perpetuity identity and its negative control") {
    const std::size_t n = 200000;
    // Exp(1) is the exact solution for uniform A
    const EmpiricalSample mu(oracle::exponential_sample(5, n), 5, "exp");
    const auto ok = perpetuity_residual(mu, quantize_family(Family::uniform01, 512), 11);
    CHECK(ok.n == n);
    CHECK(ok.ks_stat < 1.5 * ok.ks_critical_1pct);
    CHECK(ok.ecf_distance < 0.02);

    const auto bad = perpetuity_residual(mu, point_mass(1.0), 11);
    CHECK(bad.ks_stat > bad.ks_critical_1pct);
    CHECK(bad.p_value < 0.01);

    CHECK_THROWS(perpetuity_residual(EmpiricalSample({1.0}, 1, "x"), point_mass(0.5), 1));
}

TEST_CASE("empirical LST") {
    const EmpiricalSample c(std::vector<double>(10, 2.0), 1, "c");
    const std::vector<double> s{0.0, 0.5, 3.0};
    const auto l = empirical_lst(c, s);
    CHECK(l[0] == 1.0);
    CHECK(l[1] == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(l[2] == doctest::Approx(std::exp(-6.0)).epsilon(1e-15));

    const EmpiricalSample ex(oracle::exponential_sample(9, 100000), 9, "exp");
    const std::vector<double> one{1.0};
    const double v = empirical_lst(ex, one)[0];
    const double se = empirical_lst_std_error(ex, one)[0];
    CHECK(std::abs(v - 0.5) < 4.0 * se);
}

TEST_CASE("shot noise moment check") {
    const auto h = response_from_rho(point_mass(0.5), 1.0);
    McConfig cfg;
    cfg.n_samples = 50000;
    cfg.master_seed = 3;
    const EmpiricalSample theta(oracle::exponential_sample(1, 50000), 1, "t");
    const auto r2 = shot_noise_moment_check(theta, h, 2.0, cfg);
    CHECK(r2.h_power_integral == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r2.finite);
    CHECK(shot_noise_moment_check(theta, h, 1.0, cfg).h_power_integral == doctest::Approx(1.0).epsilon(1e-15));

    oracle::TestRng rng(62);
    for (int t = 0; t < 20; ++t)
        CHECK(response_from_rho(oracle::random_rho(rng), rng.uniform(0.1, 4.0)).integral_power(1.0) ==
              doctest::Approx(1.0).epsilon(1e-12));

    // second moment stabilizes as n grows
    cfg.n_samples = 50000;
    const double small = shot_noise_moment_check(theta, h, 2.0, cfg).sample_moment;
    cfg.n_samples = 200000;
    const double large = shot_noise_moment_check(theta, h, 2.0, cfg).sample_moment;
    CHECK(std::abs(small / large - 1.0) < 0.1);
}

TEST_CASE("cross check against the LST solver") {
    McConfig cfg;
    cfg.n_samples = 100000;
    cfg.master_seed = 31;
    const auto rho = point_mass(0.5);
    const auto fp = mc_fixed_point(rho, 1.0, cfg);
    SolverOptions coarse;
    coarse.grid_size = 128;
    const auto r = cross_check(fp.sample, solve(rho, 1.0), solve(rho, 1.0, coarse));
    CHECK(r.s_grid.size() == 32);
    CHECK(r.pass);
    CHECK(r.sup_distance <= r.tolerance);
}

}

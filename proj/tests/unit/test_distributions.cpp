#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "perpetuity/distributions.hpp"

using namespace perpetuity;

TEST_SUITE("distributions") {

TEST_CASE("validate keeps canonical input") {
    const auto d = validate({{0.5, 1.0}});
    REQUIRE(d.size() == 1);
    CHECK(d.atoms()[0] == Atom{0.5, 1.0});
}

TEST_CASE("validate merges duplicates") {
    const auto d = validate({{0.5, 0.5}, {0.5, 0.5}});
    REQUIRE(d.size() == 1);
    CHECK(d.atoms()[0].location == 0.5);
    CHECK(d.atoms()[0].weight == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("validate rejects bad atoms") {
    CHECK_THROWS_AS(validate({{0.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(validate({{-1.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(validate({{1.0, -0.5}, {2.0, 1.5}}), std::invalid_argument);
    CHECK_THROWS_AS(validate({{1.0, 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(validate({}), std::invalid_argument);
    CHECK_THROWS_AS(validate({{NAN, 1.0}}), std::invalid_argument);
}

TEST_CASE("validate sorts and renormalizes within tolerance") {
    const auto d = validate({{2.0, 0.5 + 2e-10}, {1.0, 0.5}});
    CHECK(d.atoms()[0].location == 1.0);
    CHECK(d.atoms()[1].location == 2.0);
    double sum = 0.0;
    for (const auto& a : d.atoms()) sum += a.weight;
    CHECK(std::abs(sum - 1.0) <= 1e-12);
}

TEST_CASE("validate is idempotent on random laws") {
    oracle::TestRng rng(11);
    for (int i = 0; i < 50; ++i) {
        const auto d = oracle::random_rho(rng);
        const auto again = validate({d.atoms().begin(), d.atoms().end()});
        CHECK(again == d);
        for (std::size_t k = 1; k < d.size(); ++k) CHECK(d.atoms()[k - 1].location < d.atoms()[k].location);
    }
}

TEST_CASE("mean") {
    CHECK(mean(point_mass(3.0)) == 3.0);
    CHECK(mean(validate({{0.5, 0.8}, {1.5, 0.2}})) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(mean(quantize_family(Family::uniform01, 512)) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("size_bias") {
    CHECK(size_bias(point_mass(2.5)) == point_mass(2.5));
    const auto sb = size_bias(validate({{1.0, 0.5}, {3.0, 0.5}}));
    REQUIRE(sb.size() == 2);
    CHECK(sb.atoms()[0].weight == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(sb.atoms()[1].weight == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("size_bias twice weights by the square") {
    oracle::TestRng rng(12);
    for (int i = 0; i < 20; ++i) {
        const auto d = oracle::random_rho(rng);
        const auto twice = size_bias(size_bias(d));
        double norm = 0.0;
        for (const auto& a : d.atoms()) norm += a.weight * a.location * a.location;
        for (std::size_t k = 0; k < d.size(); ++k) {
            const auto& a = d.atoms()[k];
            CHECK(twice.atoms()[k].weight == doctest::Approx(a.weight * a.location * a.location / norm).epsilon(1e-12));
        }
    }
}

TEST_CASE("size_bias_resample") {
    const EmpiricalSample constant(std::vector<double>(100, 2.5), 1, "const");
    for (double v : size_bias_resample(constant, 200, 3).values()) CHECK(v == 2.5);

    const EmpiricalSample zero_one({0.0, 1.0}, 1, "01");
    for (double v : size_bias_resample(zero_one, 500, 4).values()) CHECK(v == 1.0);

    const EmpiricalSample zeros({0.0, 0.0}, 1, "00");
    CHECK_THROWS(size_bias_resample(zeros, 10, 1));

    // size-biased Exp(1) is Gamma(2,1): mean 2, variance 2
    const std::size_t n = 100000;
    const EmpiricalSample ex(oracle::exponential_sample(5, n), 5, "exp");
    const auto out = size_bias_resample(ex, n, 6);
    const double mu = std::accumulate(out.values().begin(), out.values().end(), 0.0) / static_cast<double>(n);
    CHECK(std::abs(mu - 2.0) < 3.0 * std::sqrt(2.0 / static_cast<double>(n)));
}

TEST_CASE("size_bias_resample is reproducible") {
    const EmpiricalSample ex(oracle::exponential_sample(7, 1000), 7, "exp");
    CHECK(size_bias_resample(ex, 1000, 9).values() == size_bias_resample(ex, 1000, 9).values());
    CHECK(size_bias_resample(ex, 1000, 9).values() != size_bias_resample(ex, 1000, 10).values());
}

TEST_CASE("mellin") {
    oracle::TestRng rng(13);
    for (int i = 0; i < 10; ++i) CHECK(mellin(oracle::random_rho(rng), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(ExactUniform01::mellin(0.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(mellin(validate({{0.5, 0.8}, {1.5, 0.2}}), 4.0) == doctest::Approx(1.0625).epsilon(1e-14));
}

TEST_CASE("log_moment") {
    CHECK(log_moment(point_mass(0.5)) == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
    CHECK(log_moment(validate({{0.5, 0.8}, {1.5, 0.2}})) ==
          doctest::Approx(0.8 * std::log(0.5) + 0.2 * std::log(1.5)).epsilon(1e-14));
    CHECK(log_moment(validate({{0.5, 0.8}, {1.5, 0.2}})) == doctest::Approx(-0.47343).epsilon(1e-5));
    CHECK(log_moment(point_mass(2.0)) > 0.0);
}

TEST_CASE("inverse_mean and ess_sup") {
    CHECK(inverse_mean(validate({{0.01, 1.0}})) == doctest::Approx(100.0).epsilon(1e-14));
    CHECK(ess_sup(validate({{0.5, 0.8}, {1.5, 0.2}})) == 1.5);
}

TEST_CASE("quantize_family") {
    const auto two = quantize_family(Family::uniform01, 2);
    REQUIRE(two.size() == 2);
    CHECK(two.atoms()[0] == Atom{0.25, 0.5});
    CHECK(two.atoms()[1] == Atom{0.75, 0.5});

    const auto q = quantize_family(Family::uniform01, 512);
    CHECK(mean(q) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(log_moment(q) + 1.0) < 1e-3);
    CHECK(q.max_location() == 1.0 - 1.0 / 1024.0);

    const std::vector<double> table{0.5, 0.5};
    const auto t = quantize_family(Family::user_quantile_table, 2, table);
    REQUIRE(t.size() == 1);
    CHECK(t.atoms()[0].location == 0.5);
    CHECK(t.atoms()[0].weight == doctest::Approx(1.0));

    const std::vector<double> bad{0.5, 0.2};
    CHECK_THROWS(quantize_family(Family::user_quantile_table, 2, bad));
    CHECK_THROWS(quantize_family(Family::uniform01, 0));
}

TEST_CASE("empirical sample invariants") {
    CHECK_THROWS(EmpiricalSample({}, 1, "x"));
    CHECK_THROWS(EmpiricalSample({1.0, -1.0}, 1, "x"));
    CHECK_THROWS(EmpiricalSample({1.0, INFINITY}, 1, "x"));
    const EmpiricalSample s({0.0, 1.0}, 42, "prov");
    CHECK(s.seed() == 42);
    CHECK(s.provenance() == "prov");
}

TEST_CASE("moment vector log-convexity") {
    MomentVector mv;
    mv.moments = {1.0, 1.0, 2.0, 6.0, 24.0};
    CHECK(mv.is_log_convex());
    mv.moments = {1.0, 1.0, 0.5, 6.0};
    CHECK_FALSE(mv.is_log_convex());
}

}

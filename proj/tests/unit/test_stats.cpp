#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "perpetuity/random.hpp"
#include "perpetuity/stats.hpp"

using namespace perpetuity;

TEST_SUITE("stats") {

TEST_CASE("two-sample KS") {
    const std::vector<double> a{1, 2, 3, 4};
    CHECK(ks_two_sample(a, a) == 0.0);
    const std::vector<double> b{5, 6, 7, 8};
    CHECK(ks_two_sample(a, b) == 1.0);
    const std::vector<double> c{1, 1, 2, 2};
    const std::vector<double> d{1, 2, 2, 2};
    CHECK(ks_two_sample(c, d) == doctest::Approx(0.25));
}

TEST_CASE("two-sample KS matches brute force") {
    oracle::TestRng rng(71);
    for (int t = 0; t < 30; ++t) {
        std::vector<double> a(1 + rng.index(40)), b(1 + rng.index(40));
        // coarse values to force ties
        for (auto& x : a) x = std::floor(rng.uniform(0, 10));
        for (auto& x : b) x = std::floor(rng.uniform(0, 10));
        double brute = 0.0;
        for (double z = -1.0; z <= 11.0; z += 0.5) {
            double fa = 0.0, fb = 0.0;
            for (double x : a) fa += x <= z;
            for (double x : b) fb += x <= z;
            brute = std::max(brute, std::abs(fa / a.size() - fb / b.size()));
        }
        CHECK(ks_two_sample(a, b) == doctest::Approx(brute).epsilon(1e-14));
    }
}

TEST_CASE("Kolmogorov distribution") {
    CHECK(kolmogorov_survival(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
    CHECK(kolmogorov_survival(1.6276) == doctest::Approx(0.01).epsilon(1e-3));
    CHECK(kolmogorov_survival(0.0) == 1.0);
    CHECK(kolmogorov_survival(10.0) < 1e-80);
    CHECK(ks_critical_value(0.01, 100, 100) == doctest::Approx(1.6276 * std::sqrt(0.02)).epsilon(1e-4));
}

TEST_CASE("one-sample KS on uniforms") {
    oracle::TestRng rng(72);
    std::vector<double> u(50000);
    for (auto& x : u) x = rng.uniform();
    const double d = ks_one_sample(u, [](double x) { return std::clamp(x, 0.0, 1.0); });
    CHECK(d < 1.6276 / std::sqrt(50000.0));
}

TEST_CASE("empirical CDF") {
    const std::vector<double> xs{3, 1, 2, 2};
    const EmpiricalCdf F(xs);
    CHECK(F(0.5) == 0.0);
    CHECK(F(2.0) == 0.75);
    CHECK(F.mid(2.0) == doctest::Approx(0.5));
    CHECK(F(3.0) == 1.0);
}

TEST_CASE("empirical characteristic function") {
    const std::vector<double> xs{0.0, 0.0};
    CHECK(std::abs(empirical_cf(xs, 5.0) - std::complex<double>(1.0, 0.0)) < 1e-15);
    const std::vector<double> one{1.0};
    CHECK(std::abs(empirical_cf(one, 2.0) - std::exp(std::complex<double>(0.0, 2.0))) < 1e-15);
}

TEST_CASE("alias table frequencies") {
    const std::vector<double> w{0.1, 0.0, 0.6, 0.3};
    const AliasTable table(w);
    Rng rng(5);
    std::vector<double> counts(4, 0.0);
    const int n = 200000;
    for (int i = 0; i < n; ++i) counts[table(rng)] += 1.0;
    CHECK(counts[1] == 0.0);
    for (std::size_t k = 0; k < 4; ++k)
        CHECK(std::abs(counts[k] / n - w[k]) < 4.0 * std::sqrt(w[k] * (1 - w[k]) / n) + 1e-12);
}

TEST_CASE("Poisson sampler moments") {
    for (double mean : {0.3, 2.0, 30.0, 100.0}) {
        PoissonSampler p(mean);
        Rng rng(9);
        const int n = 100000;
        double s = 0.0, s2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double k = static_cast<double>(p(rng));
            s += k;
            s2 += k * k;
        }
        const double mu = s / n;
        CHECK(std::abs(mu - mean) < 4.0 * std::sqrt(mean / n));
        CHECK(std::abs((s2 / n - mu * mu) / mean - 1.0) < 0.05);
    }
    PoissonSampler zero(0.0);
    Rng rng(1);
    CHECK(zero(rng) == 0);
}

}

#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace perpetuity {

// Kolmogorov-Smirnov statistics on sorted or unsorted data. Ties are handled
// by advancing over equal values before comparing the two step functions.
double ks_two_sample(std::span<const double> a, std::span<const double> b);
double ks_one_sample(std::span<const double> xs, const std::function<double(double)>& cdf);

// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} e^{-2 k^2 lambda^2}.
double kolmogorov_survival(double lambda);
// p-value with the Stephens small-sample correction on the effective size.
double ks_p_value(double statistic, double effective_n);
inline double ks_effective_n(std::size_t n1, std::size_t n2) {
    return static_cast<double>(n1) * static_cast<double>(n2) / static_cast<double>(n1 + n2);
}

// c(alpha) sqrt((n1 + n2) / (n1 n2)), c(alpha) = sqrt(-log(alpha/2) / 2).
double ks_critical_value(double alpha, std::size_t n1, std::size_t n2);

std::complex<double> empirical_cf(std::span<const double> xs, double s);

// Empirical CDF helper over a sorted copy of the data.
class EmpiricalCdf {
public:
    explicit EmpiricalCdf(std::span<const double> xs);
    // P(X <= x)
    [[nodiscard]] double operator()(double x) const;
    // (P(X < x) + P(X <= x)) / 2
    [[nodiscard]] double mid(double x) const;
    [[nodiscard]] const std::vector<double>& sorted() const noexcept { return sorted_; }

private:
    std::vector<double> sorted_;
};

}  // namespace perpetuity

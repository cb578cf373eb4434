#include "perpetuity/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "perpetuity/numeric.hpp"

namespace perpetuity {

namespace {
std::vector<double> sorted_copy(std::span<const double> xs) {
    std::vector<double> v(xs.begin(), xs.end());
    std::sort(v.begin(), v.end());
    return v;
}
}  // namespace

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    const auto x = sorted_copy(a);
    const auto y = sorted_copy(b);
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v) ++i;
        while (j < y.size() && y[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
    }
    return d;
}

double ks_one_sample(std::span<const double> xs, const std::function<double(double)>& cdf) {
    if (xs.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
    const auto x = sorted_copy(xs);
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < x.size()) {
        const double v = x[i];
        const double below = static_cast<double>(i) / n;
        while (i < x.size() && x[i] == v) ++i;
        const double at = static_cast<double>(i) / n;
        const double f = cdf(v);
        d = std::max({d, std::abs(at - f), std::abs(f - below)});
    }
    return d;
}

double kolmogorov_survival(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-16) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_p_value(double statistic, double effective_n) {
    const double rn = std::sqrt(effective_n);
    return kolmogorov_survival((rn + 0.12 + 0.11 / rn) * statistic);
}

double ks_critical_value(double alpha, std::size_t n1, std::size_t n2) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("ks_critical_value: alpha in (0,1)");
    const double c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
    return c / std::sqrt(ks_effective_n(n1, n2));
}

std::complex<double> empirical_cf(std::span<const double> xs, double s) {
    CompensatedSum re, im;
    for (double x : xs) {
        re += std::cos(s * x);
        im += std::sin(s * x);
    }
    const double n = static_cast<double>(xs.size());
    return {re.value() / n, im.value() / n};
}

EmpiricalCdf::EmpiricalCdf(std::span<const double> xs) : sorted_(sorted_copy(xs)) {
    if (sorted_.empty()) throw std::invalid_argument("EmpiricalCdf: empty sample");
}

double EmpiricalCdf::operator()(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double EmpiricalCdf::mid(double x) const {
    const auto lo = std::lower_bound(sorted_.begin(), sorted_.end(), x);
    const auto hi = std::upper_bound(lo, sorted_.end(), x);
    const double n = static_cast<double>(sorted_.size());
    return 0.5 * (static_cast<double>(lo - sorted_.begin()) + static_cast<double>(hi - sorted_.begin())) / n;
}

}  // namespace perpetuity

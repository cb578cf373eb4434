#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace perpetuity {

// Neumaier-compensated accumulator.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(double x) noexcept {
        add(x);
        return *this;
    }
    [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) noexcept {
    CompensatedSum acc;
    for (double x : xs) acc += x;
    return acc.value();
}

inline double sample_mean(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("mean of empty array");
    return compensated_sum(xs) / static_cast<double>(xs.size());
}

// Unbiased sample variance.
inline double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("variance needs at least two values");
    const double mu = sample_mean(xs);
    CompensatedSum acc;
    for (double x : xs) acc += (x - mu) * (x - mu);
    return acc.value() / static_cast<double>(xs.size() - 1);
}

// n points spaced uniformly in log between lo and hi (inclusive).
inline std::vector<double> log_space(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2)
        throw std::invalid_argument("log_space: need 0 < lo < hi and n >= 2");
    std::vector<double> out(n);
    const double a = std::log(lo);
    const double step = (std::log(hi) - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(a + step * static_cast<double>(i));
    out.front() = lo;
    out.back() = hi;
    return out;
}

}  // namespace perpetuity

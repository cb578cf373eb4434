#include "perpetuity/random.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "perpetuity/numeric.hpp"

namespace perpetuity {

namespace {
constexpr double kTabulatedPoissonMaxMean = 64.0;
}

PoissonSampler::PoissonSampler(double mean)
    : mean_(mean), fallback_(mean > 0.0 ? mean : 1.0) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw std::invalid_argument("PoissonSampler: bad mean");
    if (mean == 0.0 || mean > kTabulatedPoissonMaxMean) return;
    double p = std::exp(-mean);
    double c = p;
    cdf_.push_back(c);
    for (long k = 1; c < 1.0 - 1e-17 && k < 100000; ++k) {
        p *= mean / static_cast<double>(k);
        if (k > mean && p < 1e-300) break;
        c += p;
        cdf_.push_back(c);
    }
}

long PoissonSampler::operator()(Rng& rng) {
    if (mean_ == 0.0) return 0;
    if (cdf_.empty()) return fallback_(rng);
    const double u = uniform01(rng);
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<long>(it - cdf_.begin());
}

AliasTable::AliasTable(std::span<const double> weights) {
    const std::size_t n = weights.size();
    if (n == 0) throw std::invalid_argument("AliasTable: no weights");
    const double total = compensated_sum(weights);
    if (!(total > 0.0) || !std::isfinite(total))
        throw std::invalid_argument("AliasTable: weights must have positive finite total");

    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    std::vector<double> scaled(n);
    std::vector<std::size_t> small, large;
    small.reserve(n);
    large.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (weights[i] < 0.0) throw std::invalid_argument("AliasTable: negative weight");
        scaled[i] = weights[i] * static_cast<double>(n) / total;
        (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
        const std::size_t s = small.back();
        small.pop_back();
        const std::size_t l = large.back();
        prob_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    for (std::size_t i : large) {
        prob_[i] = 1.0;
        alias_[i] = i;
    }
    // leftovers from rounding
    for (std::size_t i : small) {
        prob_[i] = 1.0;
        alias_[i] = i;
    }
}

}  // namespace perpetuity

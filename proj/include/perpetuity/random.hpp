#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace perpetuity {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Stream seed = master ^ hash(iteration, chunk, purpose). Independent of
// execution order, so chunks can run on any thread.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t iteration,
                                           std::uint64_t chunk, std::string_view purpose) noexcept {
    std::uint64_t h = splitmix64(fnv1a64(purpose));
    h = splitmix64(h ^ iteration);
    h = splitmix64(h ^ (chunk * 0xd6e8feb86659fd93ULL));
    return master ^ h;
}

// Uniform on [0,1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) noexcept { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Poisson(mean) by inversion of a tabulated CDF; falls back to
// std::poisson_distribution for large means.
class PoissonSampler {
public:
    explicit PoissonSampler(double mean);
    long operator()(Rng& rng);

private:
    double mean_;
    std::vector<double> cdf_;
    std::poisson_distribution<long> fallback_;
};

// Walker/Vose alias table for O(1) draws from a finite weighted law.
class AliasTable {
public:
    AliasTable() = default;
    explicit AliasTable(std::span<const double> weights);

    [[nodiscard]] std::size_t size() const noexcept { return prob_.size(); }
    [[nodiscard]] bool empty() const noexcept { return prob_.empty(); }

    std::size_t operator()(Rng& rng) const noexcept { return draw(uniform01(rng)); }

    // Single-uniform draw; u in [0,1).
    [[nodiscard]] std::size_t draw(double u) const noexcept {
        const double scaled = u * static_cast<double>(prob_.size());
        std::size_t k = static_cast<std::size_t>(scaled);
        if (k >= prob_.size()) k = prob_.size() - 1;
        const double frac = scaled - static_cast<double>(k);
        return frac < prob_[k] ? k : alias_[k];
    }

private:
    std::vector<double> prob_;
    std::vector<std::size_t> alias_;
};

}  // namespace perpetuity

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include "perpetuity/distributions.hpp"

namespace perpetuity {

inline constexpr std::size_t kMaxMomentOrder = 64;

// C(n, k) for n <= 64, exact in 64-bit integers.
std::uint64_t binomial(unsigned n, unsigned k);

// g(p) = E A^p, evaluated at integer p only.
using MellinFunction = std::function<double(double)>;

// Moments of eta from
//   E eta^{n+1} (1 - g(n)) = sum_{k<n} C(n,k) g(k) E eta^{k+1} E eta^{n-k},
// stopping at the first n with g(n) >= 1 - 1e-12 (moment n+1 is infinite).
MomentVector eta_moments(const MellinFunction& g, double m, std::size_t max_order);
MomentVector eta_moments(const AtomicDistribution& rho, double m, std::size_t max_order);
MomentVector eta_moments_uniform01_exact(double m, std::size_t max_order);

// E eta_sb^n = E eta^{n+1} / m.
MomentVector sb_moments(const MomentVector& eta);

}  // namespace perpetuity

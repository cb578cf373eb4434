#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "perpetuity/distributions.hpp"

namespace perpetuity {

// The finite measure x M(dx) = L(A eta_sb)(dx), held as a sorted sample with
// its empirical CDF tabulated on grid_x. M itself may have infinite mass.
struct LevyEstimate {
    std::vector<double> sample;  // sorted draws of A * eta_sb
    std::vector<double> grid_x;
    std::vector<double> cdf;
    // m E[1/(A eta_sb)] = E[1/A] P(eta > 0); infinite when M is not finite
    double total_mass_of_M = 0.0;
    double mean_target = 0.0;
};

// Draws eta_sb by size-biased resampling of mu_sample and A from rho.
// n_out = 0 keeps the size of mu_sample.
LevyEstimate levy_from_solution(const AtomicDistribution& rho, const EmpiricalSample& mu_sample,
                                std::uint64_t seed, std::size_t n_out = 0, std::size_t grid_points = 256);

// mu enters the check through its CDF and the CDF of its size-biased law.
struct SolutionLaw {
    std::function<double(double)> cdf;     // mu[0, x]
    std::function<double(double)> sb_cdf;  // mu_sb[0, x]

    static SolutionLaw from_sample(const EmpiricalSample& sample);
};

struct SteutelReport {
    std::vector<double> probes;
    std::vector<double> lhs;
    std::vector<double> rhs;
    double residual = 0.0;
};

// Both sides of mu_sb[0,x] = int_0^x mu[0, x-y] y M(dy) at each probe; the
// right side is averaged over the Levy sample. Throws std::domain_error for
// probes outside (0, max of the Levy sample].
SteutelReport steutel_residual(const SolutionLaw& mu, const LevyEstimate& levy,
                               std::span<const double> x_probes);

}  // namespace perpetuity

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "perpetuity/distributions.hpp"
#include "perpetuity/lst_solver.hpp"
#include "perpetuity/response.hpp"

namespace perpetuity {

// Sample index space is cut into chunks of chunk_size; chunk c of a call
// seeded with `seed` draws from derive_seed(seed, 0, c, purpose). Output is a
// pure function of (inputs, seed, chunk_size); `threads` only changes speed.
struct McConfig {
    std::size_t n_samples = 200000;
    std::size_t n_transform_iterations = 40;
    std::uint64_t master_seed = 0;
    std::size_t chunk_size = 8192;
    unsigned threads = 1;
};

inline constexpr std::size_t kMinSamplesForVerdict = 1000;

// One shot-noise transform: each output is sum_i xi_i h(tau_i) over a Poisson
// flow, drawn exactly for step h as a Poisson(lambda * |supp h|) number of
// points, each placed on step k with probability duration_k / |supp h| and
// carrying an independent xi resampled from theta. n_out = 0 keeps theta's size.
EmpiricalSample shot_noise_resample(const EmpiricalSample& theta, const ResponseFunction& h,
                                    std::uint64_t seed, std::size_t n_out = 0,
                                    std::size_t chunk_size = 8192, unsigned threads = 1);

// Same transform applied to two atomic laws with common random numbers: the
// Poisson counts and step choices are shared and each xi pair comes from the
// two quantile functions at one uniform.
std::pair<EmpiricalSample, EmpiricalSample> shot_noise_coupled(const AtomicDistribution& theta1,
                                                               const AtomicDistribution& theta2,
                                                               const ResponseFunction& h,
                                                               std::uint64_t seed, std::size_t n_out,
                                                               std::size_t chunk_size = 8192,
                                                               unsigned threads = 1);

struct McIterationStats {
    double raw_mean;        // sample mean right after the transform
    double standard_error;  // of that mean
};

struct McFixedPoint {
    EmpiricalSample sample;
    std::vector<McIterationStats> iterations;
};

using McObserver = std::function<void(std::size_t iteration, const EmpiricalSample& sample)>;

// mu_0 = delta_m, mu_n = T mu_{n-1}. After each transform the sample is
// rescaled to mean exactly m: the mean is a neutral direction of the
// resampling chain and would otherwise drift like a random walk.
McFixedPoint mc_fixed_point(const AtomicDistribution& rho, double m, const McConfig& cfg,
                            const McObserver& observer = {});

struct PerpetuityReport {
    double ks_stat = 0.0;
    double p_value = 0.0;
    double ks_critical_1pct = 0.0;
    double ecf_distance = 0.0;
    std::size_t n = 0;
};

// Compares eta_sb against A eta_sb' + eta with all three drawn independently
// from mu_sample (size-biased where required) and A from rho.
PerpetuityReport perpetuity_residual(const EmpiricalSample& mu_sample, const AtomicDistribution& rho,
                                     std::uint64_t seed);

// (1/n) sum exp(-s x_i)
std::vector<double> empirical_lst(const EmpiricalSample& sample, std::span<const double> s_grid);
// standard error of each empirical_lst entry
std::vector<double> empirical_lst_std_error(const EmpiricalSample& sample,
                                            std::span<const double> s_grid);

struct ShotNoiseMomentReport {
    double p = 0.0;
    double h_power_integral = 0.0;  // lambda * integral of h^p
    double theta_moment = 0.0;      // E xi^p over theta
    double sample_moment = 0.0;     // p-th moment of one transformed sample
    bool finite = false;            // sufficient condition: both of the above finite
};

ShotNoiseMomentReport shot_noise_moment_check(const EmpiricalSample& theta, const ResponseFunction& h,
                                              double p, const McConfig& cfg);

// LST of the Monte Carlo sample against the solved grid on 32 log-spaced
// points in [0.01/m, 100/m]. grid_error is the sup difference between the
// fine and coarse grids at those points.
struct CrossCheckReport {
    std::vector<double> s_grid;
    std::vector<double> mc_lst;
    std::vector<double> grid_lst;
    double sup_distance = 0.0;
    double mc_std_error = 0.0;  // largest standard error over the points
    double grid_error = 0.0;
    double tolerance = 0.0;     // 3 (mc_std_error + grid_error)
    bool pass = false;
};

CrossCheckReport cross_check(const EmpiricalSample& sample, const LstGrid& fine, const LstGrid& coarse);

}  // namespace perpetuity

#pragma once

#include <cstddef>
#include <vector>

#include "perpetuity/distributions.hpp"

namespace perpetuity {

// Laplace exponent psi = -log(phi) of the solution, sampled on a log-spaced
// grid. Off-grid reads interpolate log psi linearly in log s; below s_min the
// exact first-order law psi = m s is used; above s_max the last log-s slope
// of psi is continued.
struct LstGrid {
    std::vector<double> s_points;
    std::vector<double> psi;
    double mean_target = 0.0;
    double atom_at_zero = 0.0;
    std::size_t iteration_count = 0;
    double residual = 0.0;
    // ratio of the last two sup-norm updates, recorded for reporting only
    double observed_rate = 0.0;
    bool converged = false;
    // some evaluation needed psi above s_max
    bool extrapolated = false;

    [[nodiscard]] std::size_t size() const noexcept { return s_points.size(); }
    [[nodiscard]] double s_min() const noexcept { return s_points.front(); }
    [[nodiscard]] double s_max() const noexcept { return s_points.back(); }
    [[nodiscard]] std::vector<double> phi() const;
};

struct SolverOptions {
    double s_min = 1e-3;
    double s_max = 1e3;
    std::size_t grid_size = 256;
    double tol = 1e-13;
    std::size_t max_iter = 100000;
};

// psi_0(s) = m s, the transform of the point mass at m.
LstGrid init_grid(double m, double s_min, double s_max, std::size_t grid_size);

// psi_{n+1}(s) = sum_j (w_j / a_j) (1 - exp(-psi_n(s a_j))).
LstGrid iterate_once(const LstGrid& grid, const AtomicDistribution& rho);

// Iterates from init_grid until the sup-norm update drops below tol. Throws
// ExistenceError if E log A >= 0; returns converged == false when max_iter
// runs out first.
LstGrid solve(const AtomicDistribution& rho, double m, const SolverOptions& options = {});

// Interpolated read-outs using the same rules as iterate_once.
double eval_psi(const LstGrid& grid, double s);
double eval_lst(const LstGrid& grid, double s);

// sup over grid points of |psi - update(psi)|.
double functional_residual(const LstGrid& grid, const AtomicDistribution& rho);

// Smallest root in [0,1) of c = exp(-K (1 - c)), K = E[1/A].
double atom_at_zero(const AtomicDistribution& rho);
double atom_at_zero_for_intensity(double inverse_mean);

// psi >= 0, nondecreasing and concave in s, up to rel_tol relative to psi.
// The first-order law m s used below s_min leaves concavity defects of
// relative size about s_min on the solved grid, hence the loose default.
bool satisfies_shape_invariants(const LstGrid& grid, double rel_tol = 1e-3);

}  // namespace perpetuity

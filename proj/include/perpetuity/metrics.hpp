#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "perpetuity/distributions.hpp"
#include "perpetuity/montecarlo.hpp"
#include "perpetuity/random.hpp"

namespace perpetuity {

struct RDeltaConfig {
    double delta = 1.5;
    double s_lo = 1e-4;
    double s_hi = 1e4;
    std::size_t quad_points = 2048;
    // also evaluate on a grid with twice the points and report the change
    bool doubling_check = true;
    unsigned threads = 1;
};

struct RDeltaReport {
    double value = 0.0;
    // bound on the mass cut off outside [s_lo, s_hi]
    double truncation_error = 0.0;
    // |value(2 * quad_points) - value| / value, or 0 without the check
    double doubling_error = 0.0;
};

using CharacteristicFunction = std::function<std::complex<double>(double)>;

// A law given by weighted points: atomic laws, or samples with weight 1/n.
struct PointLaw {
    std::vector<double> locations;
    std::vector<double> weights;

    static PointLaw from(const AtomicDistribution& d);
    static PointLaw from(const EmpiricalSample& s);
    [[nodiscard]] double moment(double p) const;
    [[nodiscard]] std::complex<double> cf(double s) const;
};

// r_delta(nu1, nu2) = int_0^inf s^{-delta-1} |chi_1(s) - chi_2(s)| ds by the
// trapezoid rule in log s over [s_lo, s_hi]. Throws std::invalid_argument on
// delta outside (1,2) or means differing by more than 1e-6 m.
RDeltaReport r_delta(const PointLaw& nu1, const PointLaw& nu2, const RDeltaConfig& cfg);
RDeltaReport r_delta(const AtomicDistribution& nu1, const AtomicDistribution& nu2, const RDeltaConfig& cfg);
RDeltaReport r_delta(const EmpiricalSample& nu1, const EmpiricalSample& nu2, const RDeltaConfig& cfg);

// Variant for laws known through their characteristic functions; the caller
// supplies the common mean and a bound on E X^2 + E Y^2 for the head error.
RDeltaReport r_delta(const CharacteristicFunction& cf1, const CharacteristicFunction& cf2,
                     double second_moment_sum, const RDeltaConfig& cfg);

struct ContractionReport {
    double r_before = 0.0;
    double r_after = 0.0;         // Monte Carlo, common random numbers
    double ratio = 0.0;
    double r_after_exact = 0.0;   // from the closed-form transformed CF
    double ratio_exact = 0.0;
    double bound_g = 0.0;         // E A^{q-1} = lambda * integral of h^q
    double q = 0.0;
    double doubling_error = 0.0;
    bool zero_distance = false;   // theta1 == theta2; ratios reported as 0
};

// One shot-noise step applied to theta1 and theta2, distances in r_q before
// and after. Requires equal means, q in (1,2) and E A^{q-1} < 1.
ContractionReport contraction_ratio(const AtomicDistribution& rho, const AtomicDistribution& theta1,
                                    const AtomicDistribution& theta2, double q, const RDeltaConfig& cfg,
                                    const McConfig& mc);

// Characteristic function of T_{h,lambda} theta for atomic theta and step h.
std::complex<double> transformed_cf(const AtomicDistribution& theta, const ResponseFunction& h, double s);

// Random atomic law with 1..max_atoms atoms rescaled to mean m.
AtomicDistribution random_atomic_with_mean(Rng& rng, double m, std::size_t max_atoms = 5);

}  // namespace perpetuity

#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace perpetuity {

struct Atom {
    double location;
    double weight;

    friend bool operator==(const Atom&, const Atom&) = default;
};

// Finite law on (0, inf): strictly increasing positive locations, positive
// weights summing to one. Only constructible through validate().
class AtomicDistribution {
public:
    [[nodiscard]] std::span<const Atom> atoms() const noexcept { return atoms_; }
    [[nodiscard]] std::size_t size() const noexcept { return atoms_.size(); }
    [[nodiscard]] double min_location() const noexcept { return atoms_.front().location; }
    [[nodiscard]] double max_location() const noexcept { return atoms_.back().location; }
    [[nodiscard]] std::vector<double> locations() const;
    [[nodiscard]] std::vector<double> weights() const;

    friend bool operator==(const AtomicDistribution&, const AtomicDistribution&) = default;

private:
    friend AtomicDistribution validate(std::vector<Atom> raw);
    explicit AtomicDistribution(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {}
    std::vector<Atom> atoms_;
};

inline constexpr double kWeightSumTolerance = 1e-9;

// Sorts, merges duplicate locations and renormalizes when the weight sum is
// within 1e-9 of one. Throws std::invalid_argument otherwise.
AtomicDistribution validate(std::vector<Atom> raw);

AtomicDistribution point_mass(double location);

double mean(const AtomicDistribution& dist);
AtomicDistribution size_bias(const AtomicDistribution& dist);
// g(p) = E A^p
double mellin(const AtomicDistribution& dist, double p);
double log_moment(const AtomicDistribution& dist);
// E[1/A]; the total Poisson intensity of the dual shot noise.
double inverse_mean(const AtomicDistribution& dist);
inline double ess_sup(const AtomicDistribution& dist) { return dist.max_location(); }

enum class Family { uniform01, user_quantile_table };

// uniform01: midpoints (2k-1)/(2n) with weight 1/n. user_quantile_table:
// the table entries with weight 1/n each (n = table size).
AtomicDistribution quantize_family(Family family, std::size_t n,
                                   std::span<const double> quantile_table = {});

// Closed forms for the exact (unquantized) uniform law on (0,1].
struct ExactUniform01 {
    static double mellin(double p) { return 1.0 / (p + 1.0); }
    static constexpr double log_moment() { return -1.0; }
    static constexpr double ess_sup() { return 1.0; }
    static constexpr double inverse_mean() { return std::numeric_limits<double>::infinity(); }
};

class EmpiricalSample {
public:
    EmpiricalSample(std::vector<double> values, std::uint64_t seed, std::string provenance);

    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] const std::string& provenance() const noexcept { return provenance_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

private:
    std::vector<double> values_;
    std::uint64_t seed_;
    std::string provenance_;
};

// Draws n_out values with probability proportional to value.
EmpiricalSample size_bias_resample(const EmpiricalSample& sample, std::size_t n_out,
                                   std::uint64_t seed);

// Moments E eta^n for n = 0..max_order. moments[n] is the n-th moment.
struct MomentVector {
    double mean = 0.0;
    std::vector<double> moments;
    std::size_t max_order = 0;
    // The recursion stopped because g(n) came within 1e-12 of one.
    bool marginal = false;
    // The recursion stopped before the requested order (moment infinite).
    bool truncated = false;

    [[nodiscard]] bool is_log_convex(double rel_tol = 1e-12) const;
};

}  // namespace perpetuity

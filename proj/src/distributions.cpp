#include "perpetuity/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "perpetuity/numeric.hpp"
#include "perpetuity/random.hpp"

namespace perpetuity {

std::vector<double> AtomicDistribution::locations() const {
    std::vector<double> out;
    out.reserve(atoms_.size());
    for (const Atom& a : atoms_) out.push_back(a.location);
    return out;
}

std::vector<double> AtomicDistribution::weights() const {
    std::vector<double> out;
    out.reserve(atoms_.size());
    for (const Atom& a : atoms_) out.push_back(a.weight);
    return out;
}

AtomicDistribution validate(std::vector<Atom> raw) {
    if (raw.empty()) throw std::invalid_argument("atomic distribution: empty atom list");
    for (const Atom& a : raw) {
        if (!std::isfinite(a.location) || !(a.location > 0.0))
            throw std::invalid_argument("atomic distribution: location " + std::to_string(a.location) +
                                        " is not strictly positive (P(A=0) must be 0)");
        if (!std::isfinite(a.weight) || !(a.weight > 0.0))
            throw std::invalid_argument("atomic distribution: weight " + std::to_string(a.weight) +
                                        " is not strictly positive");
    }
    std::stable_sort(raw.begin(), raw.end(),
                     [](const Atom& l, const Atom& r) { return l.location < r.location; });

    std::vector<Atom> merged;
    merged.reserve(raw.size());
    for (const Atom& a : raw) {
        if (!merged.empty() && merged.back().location == a.location)
            merged.back().weight += a.weight;
        else
            merged.push_back(a);
    }

    CompensatedSum total;
    for (const Atom& a : merged) total += a.weight;
    const double sum = total.value();
    if (std::abs(sum - 1.0) > kWeightSumTolerance)
        throw std::invalid_argument("atomic distribution: weights sum to " + std::to_string(sum) +
                                    ", not 1");
    // already-normalized input is left bit-identical, so validate is idempotent
    if (std::abs(sum - 1.0) > 4.0 * std::numeric_limits<double>::epsilon())
        for (Atom& a : merged) a.weight /= sum;
    return AtomicDistribution(std::move(merged));
}

AtomicDistribution point_mass(double location) { return validate({{location, 1.0}}); }

double mean(const AtomicDistribution& dist) { return mellin(dist, 1.0); }

AtomicDistribution size_bias(const AtomicDistribution& dist) {
    const double m = mean(dist);
    std::vector<Atom> biased;
    biased.reserve(dist.size());
    CompensatedSum total;
    for (const Atom& a : dist.atoms()) {
        biased.push_back({a.location, a.weight * a.location / m});
        total += biased.back().weight;
    }
    // absorb rounding so validate() sees an exact unit sum
    const double sum = total.value();
    for (Atom& a : biased) a.weight /= sum;
    return validate(std::move(biased));
}

double mellin(const AtomicDistribution& dist, double p) {
    CompensatedSum acc;
    for (const Atom& a : dist.atoms()) {
        if (p == 0.0)
            acc += a.weight;
        else if (p == 1.0)
            acc += a.weight * a.location;
        else
            acc += a.weight * std::pow(a.location, p);
    }
    return acc.value();
}

double log_moment(const AtomicDistribution& dist) {
    CompensatedSum acc;
    for (const Atom& a : dist.atoms()) acc += a.weight * std::log(a.location);
    return acc.value();
}

double inverse_mean(const AtomicDistribution& dist) {
    CompensatedSum acc;
    for (const Atom& a : dist.atoms()) acc += a.weight / a.location;
    return acc.value();
}

AtomicDistribution quantize_family(Family family, std::size_t n,
                                   std::span<const double> quantile_table) {
    std::vector<Atom> atoms;
    switch (family) {
    case Family::uniform01: {
        if (n < 2) throw std::invalid_argument("quantize_family: n must be at least 2");
        atoms.reserve(n);
        const double w = 1.0 / static_cast<double>(n);
        for (std::size_t k = 1; k <= n; ++k)
            atoms.push_back({static_cast<double>(2 * k - 1) / static_cast<double>(2 * n), w});
        break;
    }
    case Family::user_quantile_table: {
        if (quantile_table.size() < 2)
            throw std::invalid_argument("quantize_family: quantile table needs at least 2 entries");
        if (n != 0 && n != quantile_table.size())
            throw std::invalid_argument("quantize_family: n does not match quantile table size");
        const double w = 1.0 / static_cast<double>(quantile_table.size());
        for (std::size_t k = 0; k < quantile_table.size(); ++k) {
            const double q = quantile_table[k];
            if (!(q > 0.0) || !std::isfinite(q))
                throw std::invalid_argument("quantize_family: quantile values must be positive");
            if (k > 0 && q < quantile_table[k - 1])
                throw std::invalid_argument("quantize_family: quantile values must be nondecreasing");
            atoms.push_back({q, w});
        }
        break;
    }
    }
    return validate(std::move(atoms));
}

EmpiricalSample::EmpiricalSample(std::vector<double> values, std::uint64_t seed,
                                 std::string provenance)
    : values_(std::move(values)), seed_(seed), provenance_(std::move(provenance)) {
    if (values_.empty()) throw std::invalid_argument("empirical sample: no values");
    for (double v : values_)
        if (!std::isfinite(v) || v < 0.0)
            throw std::invalid_argument("empirical sample: values must be finite and nonnegative");
}

EmpiricalSample size_bias_resample(const EmpiricalSample& sample, std::size_t n_out,
                                   std::uint64_t seed) {
    const auto& xs = sample.values();
    if (compensated_sum(xs) <= 0.0)
        throw std::invalid_argument("size_bias_resample: all-zero sample has no size-biased law");
    const AliasTable table(xs);
    Rng rng(seed);
    std::vector<double> out(n_out);
    for (double& v : out) v = xs[table(rng)];
    return EmpiricalSample(std::move(out), seed, sample.provenance() + "|size_bias");
}

bool MomentVector::is_log_convex(double rel_tol) const {
    for (std::size_t n = 1; n + 1 < moments.size(); ++n) {
        const double lhs = moments[n] * moments[n];
        const double rhs = moments[n - 1] * moments[n + 1];
        if (lhs > rhs * (1.0 + rel_tol)) return false;
    }
    return true;
}

}  // namespace perpetuity

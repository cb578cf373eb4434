#include "perpetuity/levy.hpp"

#include <algorithm>
#include <memory>
#include <stdexcept>

#include "perpetuity/numeric.hpp"
#include "perpetuity/random.hpp"
#include "perpetuity/stats.hpp"

namespace perpetuity {

LevyEstimate levy_from_solution(const AtomicDistribution& rho, const EmpiricalSample& mu_sample,
                                std::uint64_t seed, std::size_t n_out, std::size_t grid_points) {
    const auto& mu = mu_sample.values();
    const double total = compensated_sum(mu);
    if (!(total > 0.0)) throw std::invalid_argument("levy_from_solution: degenerate sample (all zero)");
    if (n_out == 0) n_out = mu.size();

    const auto biased = size_bias_resample(mu_sample, n_out, derive_seed(seed, 0, 0, "levy_sb"));
    const AliasTable a_table(rho.weights());
    const auto a_values = rho.locations();
    Rng rng(derive_seed(seed, 0, 0, "levy_a"));

    LevyEstimate est;
    est.sample.resize(n_out);
    for (std::size_t i = 0; i < n_out; ++i) est.sample[i] = a_values[a_table(rng)] * biased.values()[i];
    std::sort(est.sample.begin(), est.sample.end());

    const double m = total / static_cast<double>(mu.size());
    est.mean_target = m;
    const auto positive = static_cast<double>(std::count_if(mu.begin(), mu.end(), [](double x) { return x > 0.0; }));
    est.total_mass_of_M = inverse_mean(rho) * positive / static_cast<double>(mu.size());

    const double lo = std::max(est.sample.front(), 1e-6 * m);
    const double hi = est.sample.back();
    est.grid_x = hi > lo ? log_space(lo, hi, std::max<std::size_t>(grid_points, 2)) : std::vector<double>{hi};
    const double n = static_cast<double>(n_out);
    for (double x : est.grid_x) {
        const auto it = std::upper_bound(est.sample.begin(), est.sample.end(), x);
        est.cdf.push_back(static_cast<double>(it - est.sample.begin()) / n);
    }
    return est;
}

SolutionLaw SolutionLaw::from_sample(const EmpiricalSample& sample) {
    auto cdf = std::make_shared<EmpiricalCdf>(sample.values());
    // cumulative x_i over the sorted values, for mu_sb[0, x]
    auto cum = std::make_shared<std::vector<double>>();
    CompensatedSum acc;
    for (double x : cdf->sorted()) {
        acc += x;
        cum->push_back(acc.value());
    }
    const double total = cum->back();
    if (!(total > 0.0)) throw std::invalid_argument("SolutionLaw: all-zero sample");
    SolutionLaw law;
    law.cdf = [cdf](double x) { return x < 0.0 ? 0.0 : cdf->mid(x); };
    law.sb_cdf = [cdf, cum, total](double x) {
        const auto& s = cdf->sorted();
        const auto k = static_cast<std::size_t>(std::upper_bound(s.begin(), s.end(), x) - s.begin());
        return k == 0 ? 0.0 : (*cum)[k - 1] / total;
    };
    return law;
}

SteutelReport steutel_residual(const SolutionLaw& mu, const LevyEstimate& levy,
                               std::span<const double> x_probes) {
    if (levy.sample.empty()) throw std::invalid_argument("steutel_residual: empty Levy sample");
    SteutelReport r;
    const double n = static_cast<double>(levy.sample.size());
    for (double x : x_probes) {
        if (!(x > 0.0) || x > levy.sample.back())
            throw std::domain_error("steutel_residual: probe outside the data support");
        CompensatedSum acc;
        for (double y : levy.sample) {
            if (y > x) break;
            acc += mu.cdf(x - y);
        }
        r.probes.push_back(x);
        r.lhs.push_back(mu.sb_cdf(x));
        r.rhs.push_back(acc.value() / n);
        r.residual = std::max(r.residual, std::abs(r.lhs.back() - r.rhs.back()));
    }
    return r;
}

}  // namespace perpetuity

#include "perpetuity/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "perpetuity/diagnostics.hpp"
#include "perpetuity/numeric.hpp"
#include "perpetuity/parallel.hpp"
#include "perpetuity/random.hpp"
#include "perpetuity/stats.hpp"

namespace perpetuity {

namespace {

// Calls visit(slot, step_value, u) once per Poisson point of every output
// slot, u uniform on [0,1) for the caller's xi draw.
template <class Visit>
void for_each_shot(const ResponseFunction& h, std::uint64_t seed, std::size_t n_out,
                   std::size_t chunk_size, unsigned threads, Visit&& visit) {
    if (h.steps().empty()) return;
    std::vector<double> durations, values;
    for (const Step& s : h.steps()) {
        durations.push_back(s.duration);
        values.push_back(s.value);
    }
    const AliasTable step_table(durations);
    const double intensity = h.lambda() * h.support_end();

    for_each_chunk(n_out, chunk_size, threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        Rng rng(derive_seed(seed, 0, chunk, "shot_noise"));
        PoissonSampler count(intensity);
        for (std::size_t i = begin; i < end; ++i) {
            const long n_points = count(rng);
            for (long p = 0; p < n_points; ++p) {
                const double value = values[step_table(rng)];
                visit(i, value, uniform01(rng));
            }
        }
    });
}

class AtomicQuantile {
public:
    explicit AtomicQuantile(const AtomicDistribution& d) : locations_(d.locations()) {
        CompensatedSum acc;
        for (const Atom& a : d.atoms()) {
            acc += a.weight;
            cumulative_.push_back(acc.value());
        }
    }
    double operator()(double u) const {
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        const auto k = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                             locations_.size() - 1);
        return locations_[k];
    }

private:
    std::vector<double> locations_;
    std::vector<double> cumulative_;
};

void rescale_to_mean(std::vector<double>& xs, double m) {
    const double current = sample_mean(xs);
    if (current > 0.0)
        for (double& x : xs) x *= m / current;
}

std::string fixed_point_provenance(double m, const McConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    os << "mc_fixed_point;m=" << m << ";n=" << cfg.n_samples << ";iterations=" << cfg.n_transform_iterations
       << ";chunk=" << cfg.chunk_size;
    return os.str();
}

}  // namespace

EmpiricalSample shot_noise_resample(const EmpiricalSample& theta, const ResponseFunction& h,
                                    std::uint64_t seed, std::size_t n_out, std::size_t chunk_size,
                                    unsigned threads) {
    if (n_out == 0) n_out = theta.size();
    const auto& xi = theta.values();
    const double n_xi = static_cast<double>(xi.size());
    std::vector<double> out(n_out, 0.0);
    for_each_shot(h, seed, n_out, chunk_size, threads, [&](std::size_t i, double value, double u) {
        const auto idx = std::min(static_cast<std::size_t>(u * n_xi), xi.size() - 1);
        out[i] += value * xi[idx];
    });
    return EmpiricalSample(std::move(out), seed, theta.provenance() + "|shot_noise");
}

std::pair<EmpiricalSample, EmpiricalSample> shot_noise_coupled(const AtomicDistribution& theta1,
                                                               const AtomicDistribution& theta2,
                                                               const ResponseFunction& h,
                                                               std::uint64_t seed, std::size_t n_out,
                                                               std::size_t chunk_size, unsigned threads) {
    const AtomicQuantile q1(theta1), q2(theta2);
    std::vector<double> out1(n_out, 0.0), out2(n_out, 0.0);
    for_each_shot(h, seed, n_out, chunk_size, threads, [&](std::size_t i, double value, double u) {
        out1[i] += value * q1(u);
        out2[i] += value * q2(u);
    });
    return {EmpiricalSample(std::move(out1), seed, "shot_noise_coupled;first"),
            EmpiricalSample(std::move(out2), seed, "shot_noise_coupled;second")};
}

McFixedPoint mc_fixed_point(const AtomicDistribution& rho, double m, const McConfig& cfg,
                            const McObserver& observer) {
    require_existence(rho);
    if (!(m > 0.0)) throw std::invalid_argument("mc_fixed_point: mean must be positive");
    if (cfg.n_samples < 2) throw std::invalid_argument("mc_fixed_point: need at least two samples");
    const ResponseFunction h = response_from_rho(rho, 1.0);
    const std::string provenance = fixed_point_provenance(m, cfg);

    std::vector<double> current(cfg.n_samples, m);
    std::vector<McIterationStats> stats;
    for (std::size_t it = 1; it <= cfg.n_transform_iterations; ++it) {
        const EmpiricalSample theta(std::move(current), cfg.master_seed, provenance);
        EmpiricalSample next = shot_noise_resample(theta, h, derive_seed(cfg.master_seed, it, 0, "transform"),
                                                   cfg.n_samples, cfg.chunk_size, cfg.threads);
        std::vector<double> values = next.values();
        const double raw = sample_mean(values);
        stats.push_back({raw, std::sqrt(sample_variance(values) / static_cast<double>(values.size()))});
        rescale_to_mean(values, m);
        current = std::move(values);
        if (observer) observer(it, EmpiricalSample(current, cfg.master_seed, provenance));
    }
    return {EmpiricalSample(std::move(current), cfg.master_seed, provenance), std::move(stats)};
}

PerpetuityReport perpetuity_residual(const EmpiricalSample& mu_sample, const AtomicDistribution& rho,
                                     std::uint64_t seed) {
    const std::size_t n = mu_sample.size();
    if (n < 2) throw std::invalid_argument("perpetuity_residual: degenerate sample");
    const auto left = size_bias_resample(mu_sample, n, derive_seed(seed, 0, 0, "perpetuity_left"));
    const auto biased = size_bias_resample(mu_sample, n, derive_seed(seed, 0, 0, "perpetuity_right_sb"));

    const auto& mu = mu_sample.values();
    const AliasTable a_table(rho.weights());
    const auto a_values = rho.locations();
    Rng rng(derive_seed(seed, 0, 0, "perpetuity_right"));
    std::vector<double> right(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = a_values[a_table(rng)];
        const auto pick = std::min(static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)), n - 1);
        right[i] = a * biased.values()[i] + mu[pick];
    }

    PerpetuityReport r;
    r.n = n;
    r.ks_stat = ks_two_sample(left.values(), right);
    r.p_value = ks_p_value(r.ks_stat, ks_effective_n(n, n));
    r.ks_critical_1pct = ks_critical_value(0.01, n, n);
    const double m = sample_mean(mu);
    for (double s : log_space(0.01 / m, 100.0 / m, 32))
        r.ecf_distance = std::max(r.ecf_distance, std::abs(empirical_cf(left.values(), s) - empirical_cf(right, s)));
    return r;
}

std::vector<double> empirical_lst(const EmpiricalSample& sample, std::span<const double> s_grid) {
    std::vector<double> out;
    out.reserve(s_grid.size());
    const double n = static_cast<double>(sample.size());
    for (double s : s_grid) {
        if (s == 0.0) {
            out.push_back(1.0);
            continue;
        }
        CompensatedSum acc;
        for (double x : sample.values()) acc += std::exp(-s * x);
        out.push_back(acc.value() / n);
    }
    return out;
}

std::vector<double> empirical_lst_std_error(const EmpiricalSample& sample, std::span<const double> s_grid) {
    std::vector<double> out;
    out.reserve(s_grid.size());
    std::vector<double> terms(sample.size());
    for (double s : s_grid) {
        for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = std::exp(-s * sample.values()[i]);
        out.push_back(terms.size() < 2 ? 0.0 : std::sqrt(sample_variance(terms) / static_cast<double>(terms.size())));
    }
    return out;
}

ShotNoiseMomentReport shot_noise_moment_check(const EmpiricalSample& theta, const ResponseFunction& h,
                                              double p, const McConfig& cfg) {
    if (!(p > 0.0)) throw std::invalid_argument("shot_noise_moment_check: p must be positive");
    ShotNoiseMomentReport r;
    r.p = p;
    r.h_power_integral = h.integral_power(p);
    CompensatedSum acc;
    for (double x : theta.values()) acc += std::pow(x, p);
    r.theta_moment = acc.value() / static_cast<double>(theta.size());
    r.finite = std::isfinite(r.h_power_integral) && std::isfinite(r.theta_moment);

    const auto out = shot_noise_resample(theta, h, derive_seed(cfg.master_seed, 0, 0, "moment_check"),
                                         cfg.n_samples, cfg.chunk_size, cfg.threads);
    CompensatedSum sacc;
    for (double x : out.values()) sacc += std::pow(x, p);
    r.sample_moment = sacc.value() / static_cast<double>(out.size());
    return r;
}

CrossCheckReport cross_check(const EmpiricalSample& sample, const LstGrid& fine, const LstGrid& coarse) {
    CrossCheckReport r;
    const double m = fine.mean_target;
    r.s_grid = log_space(0.01 / m, 100.0 / m, 32);
    r.mc_lst = empirical_lst(sample, r.s_grid);
    const auto se = empirical_lst_std_error(sample, r.s_grid);
    for (std::size_t i = 0; i < r.s_grid.size(); ++i) {
        const double s = r.s_grid[i];
        r.grid_lst.push_back(eval_lst(fine, s));
        r.sup_distance = std::max(r.sup_distance, std::abs(r.mc_lst[i] - r.grid_lst[i]));
        r.mc_std_error = std::max(r.mc_std_error, se[i]);
        r.grid_error = std::max(r.grid_error, std::abs(r.grid_lst[i] - eval_lst(coarse, s)));
    }
    r.tolerance = 3.0 * (r.mc_std_error + r.grid_error);
    r.pass = r.sup_distance <= r.tolerance;
    return r;
}

}  // namespace perpetuity

#include "perpetuity/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "perpetuity/numeric.hpp"
#include "perpetuity/parallel.hpp"
#include "perpetuity/random.hpp"
#include "perpetuity/response.hpp"

namespace perpetuity {

namespace {

void check_config(const RDeltaConfig& cfg) {
    if (!(cfg.delta > 1.0 && cfg.delta < 2.0)) throw std::invalid_argument("r_delta: delta must lie in (1,2)");
    if (!(cfg.s_lo > 0.0) || !(cfg.s_hi > cfg.s_lo)) throw std::invalid_argument("r_delta: need 0 < s_lo < s_hi");
    if (cfg.quad_points < 16) throw std::invalid_argument("r_delta: need at least 16 quadrature points");
}

void check_means(double m1, double m2) {
    const double scale = std::max(std::abs(m1), std::abs(m2));
    if (std::abs(m1 - m2) > 1e-6 * scale)
        throw std::invalid_argument("r_delta: means differ (" + std::to_string(m1) + " vs " + std::to_string(m2) +
                                    "), the distance diverges at 0");
}

// trapezoid in u = log s of s^{-delta} |diff(s)|
template <class Diff>
double integrate(const Diff& diff, const RDeltaConfig& cfg, std::size_t points) {
    const auto s = log_space(cfg.s_lo, cfg.s_hi, points);
    std::vector<double> f(points);
    for_each_chunk(points, 64, cfg.threads, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) f[i] = std::pow(s[i], -cfg.delta) * diff(s[i]);
    });
    const double step = (std::log(cfg.s_hi) - std::log(cfg.s_lo)) / static_cast<double>(points - 1);
    CompensatedSum acc;
    for (std::size_t i = 0; i < points; ++i) acc += (i == 0 || i + 1 == points) ? 0.5 * f[i] : f[i];
    return step * acc.value();
}

template <class Diff>
RDeltaReport integrate_report(const Diff& diff, double second_moment_sum, const RDeltaConfig& cfg) {
    check_config(cfg);
    RDeltaReport r;
    r.value = integrate(diff, cfg, cfg.quad_points);
    if (cfg.doubling_check) {
        const double fine = integrate(diff, cfg, 2 * cfg.quad_points);
        r.doubling_error = r.value > 0.0 ? std::abs(fine - r.value) / r.value : std::abs(fine);
    }
    // |chi_1 - chi_2| <= (E X^2 + E Y^2) s^2 / 2 for equal means; <= 2 always
    const double head = 0.5 * second_moment_sum * std::pow(cfg.s_lo, 2.0 - cfg.delta) / (2.0 - cfg.delta);
    const double tail = 2.0 * std::pow(cfg.s_hi, -cfg.delta) / cfg.delta;
    r.truncation_error = head + tail;
    return r;
}

}  // namespace

PointLaw PointLaw::from(const AtomicDistribution& d) { return {d.locations(), d.weights()}; }

PointLaw PointLaw::from(const EmpiricalSample& s) {
    return {s.values(), std::vector<double>(s.size(), 1.0 / static_cast<double>(s.size()))};
}

double PointLaw::moment(double p) const {
    CompensatedSum acc;
    for (std::size_t i = 0; i < locations.size(); ++i) acc += weights[i] * std::pow(locations[i], p);
    return acc.value();
}

std::complex<double> PointLaw::cf(double s) const {
    CompensatedSum re, im;
    for (std::size_t i = 0; i < locations.size(); ++i) {
        re += weights[i] * std::cos(s * locations[i]);
        im += weights[i] * std::sin(s * locations[i]);
    }
    return {re.value(), im.value()};
}

RDeltaReport r_delta(const PointLaw& nu1, const PointLaw& nu2, const RDeltaConfig& cfg) {
    check_config(cfg);
    check_means(nu1.moment(1.0), nu2.moment(1.0));
    const double m2 = nu1.moment(2.0) + nu2.moment(2.0);
    if (!std::isfinite(nu1.moment(cfg.delta)) || !std::isfinite(nu2.moment(cfg.delta)))
        throw std::invalid_argument("r_delta: delta-moment is not finite");
    return integrate_report([&](double s) { return std::abs(nu1.cf(s) - nu2.cf(s)); }, m2, cfg);
}

RDeltaReport r_delta(const AtomicDistribution& nu1, const AtomicDistribution& nu2, const RDeltaConfig& cfg) {
    return r_delta(PointLaw::from(nu1), PointLaw::from(nu2), cfg);
}

RDeltaReport r_delta(const EmpiricalSample& nu1, const EmpiricalSample& nu2, const RDeltaConfig& cfg) {
    return r_delta(PointLaw::from(nu1), PointLaw::from(nu2), cfg);
}

RDeltaReport r_delta(const CharacteristicFunction& cf1, const CharacteristicFunction& cf2,
                     double second_moment_sum, const RDeltaConfig& cfg) {
    return integrate_report([&](double s) { return std::abs(cf1(s) - cf2(s)); }, second_moment_sum, cfg);
}

std::complex<double> transformed_cf(const AtomicDistribution& theta, const ResponseFunction& h, double s) {
    const PointLaw law = PointLaw::from(theta);
    std::complex<double> exponent{0.0, 0.0};
    for (const Step& step : h.steps())
        exponent += h.lambda() * step.duration * (law.cf(s * step.value) - 1.0);
    return std::exp(exponent);
}

ContractionReport contraction_ratio(const AtomicDistribution& rho, const AtomicDistribution& theta1,
                                    const AtomicDistribution& theta2, double q, const RDeltaConfig& cfg,
                                    const McConfig& mc) {
    if (!(q > 1.0 && q < 2.0)) throw std::invalid_argument("contraction_ratio: q must lie in (1,2)");
    const double m = mean(theta1);
    check_means(m, mean(theta2));
    ContractionReport r;
    r.q = q;
    r.bound_g = mellin(rho, q - 1.0);
    if (!(r.bound_g < 1.0)) throw std::invalid_argument("contraction_ratio: E A^{q-1} must be below 1");

    RDeltaConfig qcfg = cfg;
    qcfg.delta = q;
    const auto before = r_delta(theta1, theta2, qcfg);
    r.r_before = before.value;
    r.doubling_error = before.doubling_error;
    if (theta1 == theta2 || r.r_before == 0.0) {
        r.zero_distance = true;
        return r;
    }

    const ResponseFunction h = response_from_rho(rho, 1.0);

    // exact route
    const auto second_moment = [&](const AtomicDistribution& theta) {
        return m * m + h.integral_power(2.0) * mellin(theta, 2.0);
    };
    const auto after_exact = r_delta([&](double s) { return transformed_cf(theta1, h, s); },
                                     [&](double s) { return transformed_cf(theta2, h, s); },
                                     second_moment(theta1) + second_moment(theta2), qcfg);
    r.r_after_exact = after_exact.value;
    r.ratio_exact = r.r_after_exact / r.r_before;
    r.doubling_error = std::max(r.doubling_error, after_exact.doubling_error);

    // Monte Carlo route; both samples are rescaled to the exact common mean
    auto [s1, s2] = shot_noise_coupled(theta1, theta2, h, derive_seed(mc.master_seed, 0, 0, "contraction"),
                                       mc.n_samples, mc.chunk_size, mc.threads);
    const auto normalized = [m](const EmpiricalSample& s) {
        std::vector<double> v = s.values();
        const double current = sample_mean(v);
        for (double& x : v) x *= m / current;
        return PointLaw{std::move(v), std::vector<double>(s.size(), 1.0 / static_cast<double>(s.size()))};
    };
    RDeltaConfig mc_cfg = qcfg;
    mc_cfg.doubling_check = false;
    r.r_after = r_delta(normalized(s1), normalized(s2), mc_cfg).value;
    r.ratio = r.r_after / r.r_before;
    return r;
}

AtomicDistribution random_atomic_with_mean(Rng& rng, double m, std::size_t max_atoms) {
    if (!(m > 0.0) || max_atoms == 0) throw std::invalid_argument("random_atomic_with_mean: bad arguments");
    const std::size_t k = 1 + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(max_atoms));
    std::vector<Atom> atoms;
    double total = 0.0;
    for (std::size_t i = 0; i < std::min(k, max_atoms); ++i) {
        atoms.push_back({0.05 + 3.0 * uniform01(rng), 0.05 + uniform01(rng)});
        total += atoms.back().weight;
    }
    double mu = 0.0;
    for (Atom& a : atoms) {
        a.weight /= total;
        mu += a.location * a.weight;
    }
    for (Atom& a : atoms) a.location *= m / mu;
    return validate(std::move(atoms));
}

}  // namespace perpetuity

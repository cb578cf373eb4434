#include "perpetuity/response.hpp"

#include <cmath>
#include <stdexcept>

#include "perpetuity/numeric.hpp"

namespace perpetuity {

ResponseFunction::ResponseFunction(std::vector<Step> steps, double lambda)
    : steps_(std::move(steps)), lambda_(lambda), support_end_(0.0) {
    if (!(lambda_ > 0.0) || !std::isfinite(lambda_))
        throw std::invalid_argument("response function: lambda must be positive");
    CompensatedSum end;
    for (std::size_t k = 0; k < steps_.size(); ++k) {
        const Step& s = steps_[k];
        if (!(s.value > 0.0) || !std::isfinite(s.value))
            throw std::invalid_argument("response function: step values must be positive");
        if (!(s.duration > 0.0) || !std::isfinite(s.duration))
            throw std::invalid_argument("response function: step durations must be positive");
        if (k > 0 && !(s.value < steps_[k - 1].value))
            throw std::invalid_argument("response function: step values must strictly decrease");
        end += s.duration;
    }
    support_end_ = end.value();
}

double ResponseFunction::operator()(double u) const {
    if (u < 0.0) throw std::domain_error("response function: negative argument");
    double start = 0.0;
    for (const Step& s : steps_) {
        const double stop = start + s.duration;
        if (u < stop) return s.value;
        start = stop;
    }
    return 0.0;
}

double ResponseFunction::integral_power(double q) const {
    CompensatedSum acc;
    for (const Step& s : steps_) acc += lambda_ * std::pow(s.value, q) * s.duration;
    return acc.value();
}

double ResponseFunction::integral_h_log_h() const {
    CompensatedSum acc;
    for (const Step& s : steps_) acc += (lambda_ * s.value * s.duration) * std::log(s.value);
    return acc.value();
}

ResponseFunction response_from_rho(const AtomicDistribution& rho, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("response_from_rho: lambda must be positive");
    std::vector<Step> steps;
    steps.reserve(rho.size());
    const auto atoms = rho.atoms();
    for (auto it = atoms.rbegin(); it != atoms.rend(); ++it)
        steps.push_back({it->location, it->weight / (lambda * it->location)});
    return ResponseFunction(std::move(steps), lambda);
}

AtomicDistribution rho_from_response(const ResponseFunction& h) {
    std::vector<Atom> atoms;
    atoms.reserve(h.steps().size());
    CompensatedSum total;
    for (const Step& s : h.steps()) {
        atoms.push_back({s.value, h.lambda() * s.value * s.duration});
        total += atoms.back().weight;
    }
    if (atoms.empty() || std::abs(total.value() - 1.0) > kWeightSumTolerance)
        throw std::invalid_argument("rho_from_response: lambda * integral of h is " +
                                    std::to_string(total.value()) + ", not 1");
    return validate(std::move(atoms));
}

double generalized_inverse_eval(const ResponseFunction& h, double z) {
    if (!(z > 0.0)) throw std::domain_error("generalized inverse: z must be positive");
    CompensatedSum acc;
    for (const Step& s : h.steps()) {
        if (!(s.value > z)) break;
        acc += s.duration;
    }
    return acc.value();
}

double uniform01_reference_response(double u) { return std::exp(-u); }

double uniform01_reference_inverse(double z) {
    if (!(z > 0.0)) throw std::domain_error("generalized inverse: z must be positive");
    return z >= 1.0 ? 0.0 : -std::log(z);
}

}  // namespace perpetuity

#pragma once

#include <span>
#include <vector>

#include "perpetuity/distributions.hpp"

namespace perpetuity {

struct Step {
    double value;
    double duration;
};

// Nonincreasing right-continuous step kernel h of a Poisson shot noise with
// intensity lambda: h(u) = steps[k].value on the k-th interval, 0 after the
// last one.
class ResponseFunction {
public:
    // Throws std::invalid_argument unless values are positive and strictly
    // decreasing, durations positive and lambda positive.
    ResponseFunction(std::vector<Step> steps, double lambda);

    [[nodiscard]] std::span<const Step> steps() const noexcept { return steps_; }
    [[nodiscard]] double lambda() const noexcept { return lambda_; }
    [[nodiscard]] double support_end() const noexcept { return support_end_; }
    // h(0+), or 0 when there are no steps.
    [[nodiscard]] double initial_value() const noexcept {
        return steps_.empty() ? 0.0 : steps_.front().value;
    }

    [[nodiscard]] double operator()(double u) const;

    // lambda * integral of h^q
    [[nodiscard]] double integral_power(double q) const;
    // lambda * integral of h log h
    [[nodiscard]] double integral_h_log_h() const;

private:
    std::vector<Step> steps_;
    double lambda_;
    double support_end_;
};

// Step k carries atom value a_k (descending) and duration w_k / (lambda a_k).
ResponseFunction response_from_rho(const AtomicDistribution& rho, double lambda = 1.0);

// rho(dx) = -lambda x h^{<-}(dx): one atom per step with weight lambda*value*duration.
AtomicDistribution rho_from_response(const ResponseFunction& h);

// h^{<-}(z): total duration of steps with value strictly above z. Right
// continuous, and 0 for z >= h(0+).
double generalized_inverse_eval(const ResponseFunction& h, double z);

// Reference curves of the exact uniform01 law: h(u) = e^{-u}, h^{<-}(z) = -log z.
double uniform01_reference_response(double u);
double uniform01_reference_inverse(double z);

}  // namespace perpetuity

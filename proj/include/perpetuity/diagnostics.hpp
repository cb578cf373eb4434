#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "perpetuity/distributions.hpp"

namespace perpetuity {

// Raised when E log A >= 0: no non-zero solution exists.
class ExistenceError : public std::domain_error {
public:
    explicit ExistenceError(double e_log_a);
    [[nodiscard]] double e_log_a() const noexcept { return e_log_a_; }

private:
    double e_log_a_;
};

enum class TailClass { NoExponentialMoment, ExponentialMomentNotEntire, EntireCharacteristicFunction };

std::string_view to_string(TailClass c) noexcept;

struct ExistenceResult {
    bool exists;
    double e_log_a;
};

// Strict: E log A = 0 leaves only the degenerate zero solution.
ExistenceResult existence_gate(const AtomicDistribution& rho);
void require_existence(const AtomicDistribution& rho);

TailClass tail_class(const AtomicDistribution& rho);
TailClass tail_class_from_ess_sup(double ess_sup);

// Largest integer n <= n_cap with E A^n < 1 (so E eta^{n+1} is finite);
// std::nullopt means unbounded (ess sup <= 1). Throws ExistenceError when the
// gate fails.
std::optional<unsigned> max_integer_moment_order(const AtomicDistribution& rho, unsigned n_cap);

// Always true for finite atomic laws (min location > 0).
bool compound_poisson_check(const AtomicDistribution& rho);

struct DiagnosticsReport {
    bool exists = false;
    double e_log_a = 0.0;
    double ess_sup = 0.0;
    double min_location = 0.0;
    double inverse_mean = 0.0;  // E[1/A]
    TailClass tail_class = TailClass::NoExponentialMoment;
    bool determinate = false;
    std::optional<unsigned> max_integer_moment_order;  // nullopt: unbounded (or gate failed)
    unsigned moment_order_cap = 0;
    bool compound_poisson = true;

    // Family-level answers for the exact law the atoms approximate.
    std::optional<std::string> family;
    std::optional<TailClass> family_tail_class;
    std::optional<bool> family_determinate;
    std::optional<bool> family_compound_poisson;
};

DiagnosticsReport diagnose(const AtomicDistribution& rho, unsigned n_cap = 64,
                           std::optional<Family> family = std::nullopt);

}  // namespace perpetuity

#include "perpetuity/diagnostics.hpp"

#include <sstream>

namespace perpetuity {

namespace {
std::string existence_message(double e_log_a) {
    std::ostringstream os;
    os.precision(17);
    os << "no non-zero solution: E log A = " << e_log_a << " is not negative";
    return os.str();
}
}  // namespace

ExistenceError::ExistenceError(double e_log_a)
    : std::domain_error(existence_message(e_log_a)), e_log_a_(e_log_a) {}

std::string_view to_string(TailClass c) noexcept {
    switch (c) {
    case TailClass::NoExponentialMoment: return "NoExponentialMoment";
    case TailClass::ExponentialMomentNotEntire: return "ExponentialMomentNotEntire";
    case TailClass::EntireCharacteristicFunction: return "EntireCharacteristicFunction";
    }
    return "unknown";
}

ExistenceResult existence_gate(const AtomicDistribution& rho) {
    const double e = log_moment(rho);
    return {e < 0.0, e};
}

void require_existence(const AtomicDistribution& rho) {
    const auto gate = existence_gate(rho);
    if (!gate.exists) throw ExistenceError(gate.e_log_a);
}

TailClass tail_class_from_ess_sup(double ess_sup) {
    if (ess_sup > 1.0) return TailClass::NoExponentialMoment;
    if (ess_sup < 1.0) return TailClass::EntireCharacteristicFunction;
    return TailClass::ExponentialMomentNotEntire;
}

TailClass tail_class(const AtomicDistribution& rho) { return tail_class_from_ess_sup(ess_sup(rho)); }

std::optional<unsigned> max_integer_moment_order(const AtomicDistribution& rho, unsigned n_cap) {
    require_existence(rho);
    if (ess_sup(rho) <= 1.0) return std::nullopt;
    unsigned order = 0;
    for (unsigned n = 1; n <= n_cap; ++n) {
        if (mellin(rho, static_cast<double>(n)) >= 1.0) break;
        order = n;
    }
    return order;
}

bool compound_poisson_check(const AtomicDistribution& rho) { return rho.min_location() > 0.0; }

DiagnosticsReport diagnose(const AtomicDistribution& rho, unsigned n_cap,
                           std::optional<Family> family) {
    DiagnosticsReport r;
    const auto gate = existence_gate(rho);
    r.exists = gate.exists;
    r.e_log_a = gate.e_log_a;
    r.ess_sup = ess_sup(rho);
    r.min_location = rho.min_location();
    r.inverse_mean = inverse_mean(rho);
    r.tail_class = tail_class(rho);
    r.determinate = r.ess_sup <= 1.0;
    r.moment_order_cap = n_cap;
    if (r.exists) r.max_integer_moment_order = max_integer_moment_order(rho, n_cap);
    r.compound_poisson = compound_poisson_check(rho);

    if (family == Family::uniform01) {
        r.family = "uniform01";
        r.family_tail_class = tail_class_from_ess_sup(ExactUniform01::ess_sup());
        r.family_determinate = ExactUniform01::ess_sup() <= 1.0;
        // integral of z^{-1} dz over (0,1) diverges
        r.family_compound_poisson = false;
    }
    return r;
}

}  // namespace perpetuity

#include "perpetuity/moments.hpp"

#include <array>
#include <limits>
#include <stdexcept>

#include "perpetuity/diagnostics.hpp"
#include "perpetuity/numeric.hpp"

namespace perpetuity {

namespace {

constexpr double kMarginalGap = 1e-12;

using PascalRow = std::array<std::uint64_t, kMaxMomentOrder + 1>;

std::array<PascalRow, kMaxMomentOrder + 1> build_pascal() {
    std::array<PascalRow, kMaxMomentOrder + 1> t{};
    for (std::size_t n = 0; n <= kMaxMomentOrder; ++n) {
        t[n][0] = 1;
        for (std::size_t k = 1; k <= n; ++k) t[n][k] = t[n - 1][k - 1] + (k < n ? t[n - 1][k] : 0);
    }
    return t;
}

const auto& pascal() {
    static const auto table = build_pascal();
    return table;
}

}  // namespace

std::uint64_t binomial(unsigned n, unsigned k) {
    if (n > kMaxMomentOrder) throw std::out_of_range("binomial: n above 64");
    return k > n ? 0 : pascal()[n][k];
}

MomentVector eta_moments(const MellinFunction& g, double m, std::size_t max_order) {
    if (!(m > 0.0)) throw std::invalid_argument("eta_moments: mean must be positive");
    if (max_order > kMaxMomentOrder) throw std::invalid_argument("eta_moments: order above 64");

    MomentVector out;
    out.mean = m;
    out.moments.push_back(1.0);
    if (max_order >= 1) out.moments.push_back(m);
    out.max_order = out.moments.size() - 1;

    std::vector<double> g_at;
    g_at.reserve(max_order);
    for (std::size_t n = 0; n < max_order; ++n) g_at.push_back(g(static_cast<double>(n)));

    for (std::size_t n = 1; n + 1 <= max_order; ++n) {
        const double gn = g_at[n];
        if (gn >= 1.0 - kMarginalGap) {
            out.marginal = gn < 1.0;
            out.truncated = true;
            break;
        }
        CompensatedSum acc;
        for (std::size_t k = 0; k < n; ++k)
            acc += static_cast<double>(binomial(static_cast<unsigned>(n), static_cast<unsigned>(k))) *
                   g_at[k] * out.moments[k + 1] * out.moments[n - k];
        out.moments.push_back(acc.value() / (1.0 - gn));
        out.max_order = n + 1;
    }
    return out;
}

MomentVector eta_moments(const AtomicDistribution& rho, double m, std::size_t max_order) {
    require_existence(rho);
    return eta_moments([&rho](double p) { return mellin(rho, p); }, m, max_order);
}

MomentVector eta_moments_uniform01_exact(double m, std::size_t max_order) {
    return eta_moments(&ExactUniform01::mellin, m, max_order);
}

MomentVector sb_moments(const MomentVector& eta) {
    if (eta.max_order < 1) throw std::invalid_argument("sb_moments: need at least the first moment");
    MomentVector out;
    const double m = eta.mean;
    for (std::size_t n = 0; n + 1 <= eta.max_order; ++n) out.moments.push_back(eta.moments[n + 1] / m);
    out.max_order = eta.max_order - 1;
    out.mean = out.max_order >= 1 ? out.moments[1] : std::numeric_limits<double>::infinity();
    out.marginal = eta.marginal;
    out.truncated = eta.truncated;
    return out;
}

}  // namespace perpetuity

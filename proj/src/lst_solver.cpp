#include "perpetuity/lst_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "perpetuity/diagnostics.hpp"
#include "perpetuity/numeric.hpp"

namespace perpetuity {

namespace {

// Read-only view of a grid. Inside [s_min, s_max], log psi is interpolated
// linearly in log s: psi ~ m s is then exact near zero and the slow
// logarithmic growth at large s is captured far better than by linear psi.
struct PsiReader {
    const LstGrid& grid;
    std::vector<double> log_psi;
    double log_s_min;
    double inv_step;
    double m;
    std::size_t last;

    explicit PsiReader(const LstGrid& g)
        : grid(g),
          log_psi(g.size()),
          log_s_min(std::log(g.s_min())),
          inv_step(static_cast<double>(g.size() - 1) / (std::log(g.s_max()) - std::log(g.s_min()))),
          m(g.mean_target),
          last(g.size() - 1) {
        for (std::size_t i = 0; i < g.size(); ++i) log_psi[i] = std::log(g.psi[i]);
    }

    // psi at s, with log_s = log(s) precomputed; sets `above` when the
    // continuation is used. Grid points read back their stored value.
    double at(double s, double log_s, bool& above) const {
        const double u = (log_s - log_s_min) * inv_step;
        if (s < grid.s_points.front()) return m * s;
        if (s >= grid.s_points[last]) {
            if (s == grid.s_points[last]) return grid.psi[last];
            above = true;
            const double slope = grid.psi[last] - grid.psi[last - 1];
            return grid.psi[last] + slope * (u - static_cast<double>(last));
        }
        auto k = std::min(static_cast<std::size_t>(std::max(u, 0.0)), last - 1);
        if (k > 0 && s < grid.s_points[k]) --k;
        if (k + 1 < last && s >= grid.s_points[k + 1]) ++k;
        if (s == grid.s_points[k]) return grid.psi[k];
        const double t = std::clamp(u - static_cast<double>(k), 0.0, 1.0);
        return std::exp(log_psi[k] + t * (log_psi[k + 1] - log_psi[k]));
    }
};

struct AtomTerms {
    std::vector<double> location;
    std::vector<double> log_location;
    std::vector<double> coefficient;  // w_j / a_j

    explicit AtomTerms(const AtomicDistribution& rho) {
        location.reserve(rho.size());
        log_location.reserve(rho.size());
        coefficient.reserve(rho.size());
        for (const Atom& a : rho.atoms()) {
            location.push_back(a.location);
            log_location.push_back(std::log(a.location));
            coefficient.push_back(a.weight / a.location);
        }
    }
};

std::vector<double> apply_update(const LstGrid& grid, const AtomTerms& terms, bool& above) {
    const PsiReader reader(grid);
    std::vector<double> next(grid.size());
    const std::size_t n_atoms = terms.coefficient.size();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double s = grid.s_points[i];
        const double log_s = std::log(s);
        CompensatedSum acc;
        for (std::size_t j = 0; j < n_atoms; ++j) {
            const double psi = reader.at(s * terms.location[j], log_s + terms.log_location[j], above);
            acc += terms.coefficient[j] * -std::expm1(-psi);
        }
        next[i] = acc.value();
    }
    return next;
}

double sup_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace

std::vector<double> LstGrid::phi() const {
    std::vector<double> out(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) out[i] = std::exp(-psi[i]);
    return out;
}

LstGrid init_grid(double m, double s_min, double s_max, std::size_t grid_size) {
    if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("init_grid: mean must be positive");
    if (!(s_min > 0.0) || !(s_max > s_min) || !std::isfinite(s_max))
        throw std::invalid_argument("init_grid: need 0 < s_min < s_max");
    if (grid_size < 16) throw std::invalid_argument("init_grid: grid needs at least 16 points");
    LstGrid g;
    g.s_points = log_space(s_min, s_max, grid_size);
    g.psi.resize(grid_size);
    for (std::size_t i = 0; i < grid_size; ++i) g.psi[i] = m * g.s_points[i];
    g.mean_target = m;
    return g;
}

LstGrid iterate_once(const LstGrid& grid, const AtomicDistribution& rho) {
    LstGrid next = grid;
    bool above = false;
    next.psi = apply_update(grid, AtomTerms(rho), above);
    next.extrapolated = grid.extrapolated || above;
    next.residual = sup_distance(next.psi, grid.psi);
    ++next.iteration_count;
    return next;
}

LstGrid solve(const AtomicDistribution& rho, double m, const SolverOptions& options) {
    require_existence(rho);
    if (!(options.tol > 0.0)) throw std::invalid_argument("solve: tol must be positive");
    LstGrid grid = init_grid(m, options.s_min, options.s_max, options.grid_size);
    grid.atom_at_zero = atom_at_zero(rho);
    const AtomTerms terms(rho);
    double previous_residual = std::numeric_limits<double>::quiet_NaN();
    while (grid.iteration_count < options.max_iter) {
        bool above = false;
        std::vector<double> next = apply_update(grid, terms, above);
        grid.residual = sup_distance(next, grid.psi);
        grid.psi = std::move(next);
        grid.extrapolated = grid.extrapolated || above;
        ++grid.iteration_count;
        if (previous_residual > 0.0) grid.observed_rate = grid.residual / previous_residual;
        previous_residual = grid.residual;
        if (grid.residual < options.tol) {
            grid.converged = true;
            break;
        }
    }
    return grid;
}

double eval_psi(const LstGrid& grid, double s) {
    if (s < 0.0) throw std::domain_error("eval_psi: s must be nonnegative");
    if (s == 0.0) return 0.0;
    bool above = false;
    return PsiReader(grid).at(s, std::log(s), above);
}

double eval_lst(const LstGrid& grid, double s) { return std::exp(-eval_psi(grid, s)); }

double functional_residual(const LstGrid& grid, const AtomicDistribution& rho) {
    bool above = false;
    return sup_distance(apply_update(grid, AtomTerms(rho), above), grid.psi);
}

double atom_at_zero_for_intensity(double k) {
    if (std::isinf(k)) return 0.0;
    if (!(k > 1.0))
        throw std::domain_error("atom_at_zero: E[1/A] must exceed 1 when E log A < 0");
    // f(c) = c - exp(-k(1-c)) is concave and increasing left of its smaller
    // root, so Newton from 0 climbs monotonically to it.
    double c = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double e = std::exp(-k * (1.0 - c));
        const double f = c - e;
        const double df = 1.0 - k * e;
        if (!(df > 0.0)) break;
        const double next = c - f / df;
        if (!(next > c) || next >= 1.0) break;
        c = next;
        if (std::abs(f) < 1e-16) break;
    }
    return c;
}

double atom_at_zero(const AtomicDistribution& rho) { return atom_at_zero_for_intensity(inverse_mean(rho)); }

bool satisfies_shape_invariants(const LstGrid& grid, double rel_tol) {
    const auto& s = grid.s_points;
    const auto& p = grid.psi;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] < 0.0) return false;
        if (i > 0 && p[i] < p[i - 1] * (1.0 - rel_tol)) return false;
    }
    // concave: each value sits on or above the chord through its neighbours
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
        const double t = (s[i] - s[i - 1]) / (s[i + 1] - s[i - 1]);
        const double chord = p[i - 1] + t * (p[i + 1] - p[i - 1]);
        if (chord - p[i] > rel_tol * p[i]) return false;
    }
    return true;
}

}  // namespace perpetuity

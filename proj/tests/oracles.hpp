// Test-only oracles, deliberately independent of the library's solution
// paths: a brute-force grid-search utility maximiser, central finite
// differences of the map, a Newton-based steady-state solver, and a
// deterministic uniform draw helper.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "veblen/model.hpp"

namespace oracles {

// Portable uniform double in [lo, hi): uses raw mt19937_64 bits so the
// stream is identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(gen_() >> 11) * 0x1.0p-53);
    }

private:
    std::mt19937_64 gen_;
};

// Utility along the budget line m = w - (1+tau)*c, evaluated directly from
// the primitives (no closed-form optimum anywhere in here).
inline double utility_on_budget(double c, const veblen::State& s, const veblen::ModelParams& p) {
    const double c_eff = c - p.v * p.c_ref;
    const double m = p.w - (1.0 + p.tau) * c;
    const double e_next = s.e - p.gamma * c + p.sigma * m;
    if (!(c_eff > 0.0) || !(e_next > 0.0)) return -std::numeric_limits<double>::infinity();
    return std::log(c_eff) + s.pi * std::log(e_next);
}

struct GridArgmax {
    double c;
    double cell_width;
};

inline GridArgmax grid_search_consumption(const veblen::State& s, const veblen::ModelParams& p,
                                          std::size_t points) {
    const double lo = p.v * p.c_ref;
    const double hi = p.w / (1.0 + p.tau);
    const double width = (hi - lo) / static_cast<double>(points);
    double best_u = -std::numeric_limits<double>::infinity();
    double best_c = lo + 0.5 * width;
    for (std::size_t k = 0; k < points; ++k) {
        const double c = lo + (static_cast<double>(k) + 0.5) * width;
        const double u = utility_on_budget(c, s, p);
        if (u > best_u) {
            best_u = u;
            best_c = c;
        }
    }
    return {best_c, width};
}

struct Fd2x2 {
    double de_de, de_dpi, dpi_de, dpi_dpi;
};

inline Fd2x2 finite_difference_jacobian(const veblen::State& s, const veblen::ModelParams& p,
                                        double h = 1e-6) {
    const veblen::State ep = veblen::step_map({s.e + h, s.pi}, p);
    const veblen::State em = veblen::step_map({s.e - h, s.pi}, p);
    const veblen::State pp = veblen::step_map({s.e, s.pi + h}, p);
    const veblen::State pm = veblen::step_map({s.e, s.pi - h}, p);
    return {(ep.e - em.e) / (2 * h), (pp.e - pm.e) / (2 * h), (ep.pi - em.pi) / (2 * h),
            (pp.pi - pm.pi) / (2 * h)};
}

// Newton iteration on g(pi) = pi - logistic(beta*K*pi - rho) from a spread of
// starting points; converged roots are deduplicated. Used to cross-check the
// scan-and-bisect solver with a different algorithm.
inline std::vector<double> newton_equilibria(const veblen::ModelParams& p, std::size_t starts = 64) {
    const double beta_k = p.beta * p.net_env_gain();
    auto g = [&](double pi) { return pi - veblen::detail::safe_logistic(beta_k * pi - p.rho); };
    auto dg = [&](double pi) {
        const double q = veblen::detail::safe_logistic(beta_k * pi - p.rho);
        return 1.0 - beta_k * q * (1.0 - q);
    };
    std::vector<double> roots;
    for (std::size_t i = 0; i < starts; ++i) {
        double pi = (static_cast<double>(i) + 0.5) / static_cast<double>(starts);
        bool converged = false;
        for (int it = 0; it < 100; ++it) {
            const double gi = g(pi), di = dg(pi);
            if (std::abs(di) < 1e-14) break;
            const double next = pi - gi / di;
            if (!(next > 0.0) || !(next < 1.0)) break;
            if (std::abs(next - pi) < 1e-14) {
                pi = next;
                converged = true;
                break;
            }
            pi = next;
        }
        if (!converged || std::abs(g(pi)) > 1e-12) continue;
        bool dup = false;
        for (double r : roots)
            if (std::abs(r - pi) < 1e-8) dup = true;
        if (!dup) roots.push_back(pi);
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

}  // namespace oracles

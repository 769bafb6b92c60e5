// Steady states of the reduced map. The fixed-point conditions
//
//   e_bar  = K * pi_bar
//   pi_bar = 1/(1+exp(-beta*e_bar + rho))
//
// collapse to a scalar root problem g(pi) = pi - logistic(beta*K*pi - rho)
// on (0,1), solved by a dense sign scan followed by bisection. Depending on
// the strength of the Veblen channel the map admits one to three solutions.
#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "veblen/model.hpp"

namespace veblen {

enum class EqLabel { unique, lower, middle, upper };

inline const char* to_string(EqLabel l) {
    switch (l) {
        case EqLabel::unique: return "unique";
        case EqLabel::lower: return "lower";
        case EqLabel::middle: return "middle";
        case EqLabel::upper: return "upper";
    }
    return "?";
}

struct Equilibrium {
    double e_bar;
    double pi_bar;
    double residual;  // max absolute residual of the two fixed-point conditions
    EqLabel label;
};

enum class Regime { strong, threshold, weak };

struct VeblenRegime {
    Regime regime;
    double threshold_value;  // sigma/(sigma+gamma)
    double intensity;        // v*c_ref/w
};

// Strong Veblen effects (intensity above the threshold) force a unique
// equilibrium with e_bar <= 0; below it up to three solutions coexist.
inline VeblenRegime classify_regime(const ModelParams& p) {
    VeblenRegime r;
    r.threshold_value = p.sigma / (p.sigma + p.gamma);
    r.intensity = p.v * p.c_ref / p.w;
    const double d = r.intensity - r.threshold_value;
    if (std::abs(d) <= 1e-14)
        r.regime = Regime::threshold;
    else
        r.regime = d > 0 ? Regime::strong : Regime::weak;
    return r;
}

namespace detail {

inline double eq_gap(double pi, double beta_k, const ModelParams& p) {
    return pi - safe_logistic(beta_k * pi - p.rho);
}

}  // namespace detail

// All fixed points, sorted by pi_bar. `scan_nodes` controls the density of
// the sign scan; each bracketed root is bisected to machine width. Throws if
// the scan finds no sign change (cannot happen while the logistic stays
// interior on (0,1)).
inline std::vector<Equilibrium> find_equilibria(const ModelParams& p, std::size_t scan_nodes = 10000) {
    if (scan_nodes < 2) throw std::invalid_argument("find_equilibria: scan_nodes must be >= 2");
    const double beta_k = p.beta * p.net_env_gain();
    const double lo = 1e-15, hi = 1.0 - 1e-15;

    std::vector<double> roots;
    double prev_pi = lo;
    double prev_g = detail::eq_gap(prev_pi, beta_k, p);
    if (prev_g == 0.0) roots.push_back(prev_pi);
    for (std::size_t i = 1; i < scan_nodes; ++i) {
        const double pi = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(scan_nodes - 1);
        const double g = detail::eq_gap(pi, beta_k, p);
        if (g == 0.0) {
            roots.push_back(pi);
        } else if (prev_g != 0.0 && std::signbit(g) != std::signbit(prev_g)) {
            double a = prev_pi, b = pi, ga = prev_g;
            for (int it = 0; it < 200 && b - a > 4e-16; ++it) {
                const double mid = 0.5 * (a + b);
                const double gm = detail::eq_gap(mid, beta_k, p);
                if (gm == 0.0) { a = b = mid; break; }
                if (std::signbit(gm) == std::signbit(ga)) { a = mid; ga = gm; }
                else b = mid;
            }
            roots.push_back(0.5 * (a + b));
        }
        prev_pi = pi;
        prev_g = g;
    }
    if (roots.empty())
        throw std::runtime_error("find_equilibria: sign scan found no root (logistic saturated?)");

    std::sort(roots.begin(), roots.end());
    // Merge near-tangent pairs; an even count left over signals a tangency.
    std::vector<double> merged;
    for (double r : roots) {
        if (!merged.empty() && r - merged.back() < 1e-6)
            merged.back() = 0.5 * (merged.back() + r);
        else
            merged.push_back(r);
    }

    std::vector<Equilibrium> out;
    out.reserve(merged.size());
    for (std::size_t i = 0; i < merged.size(); ++i) {
        Equilibrium eq;
        eq.pi_bar = merged[i];
        eq.e_bar = p.net_env_gain() * eq.pi_bar;
        eq.residual = std::abs(detail::eq_gap(eq.pi_bar, beta_k, p));
        if (merged.size() == 1) eq.label = EqLabel::unique;
        else if (i == 0) eq.label = EqLabel::lower;
        else if (i + 1 == merged.size()) eq.label = EqLabel::upper;
        else eq.label = EqLabel::middle;
        out.push_back(eq);
    }
    return out;
}

// Number of equilibria along an ascending rho grid. In the weak regime the
// counts trace the 1 -> 3 -> 1 pattern around the multistability window.
inline std::vector<std::pair<double, int>> equilibrium_count_profile(const ModelParams& p,
                                                                     const std::vector<double>& rho_grid) {
    std::vector<std::pair<double, int>> out;
    out.reserve(rho_grid.size());
    ModelParams q = p;
    for (double rho : rho_grid) {
        q.rho = rho;
        out.emplace_back(rho, static_cast<int>(find_equilibria(q).size()));
    }
    return out;
}

struct IsoclinePoints {
    std::vector<std::pair<double, double>> linear;    // pi = e/K, empty when K = 0
    std::vector<std::pair<double, double>> logistic;  // pi = 1/(1+exp(-beta*e+rho))
    bool vertical_linear = false;                     // K = 0: the linear isocline is e = 0
};

inline IsoclinePoints isocline_points(const ModelParams& p, const std::vector<double>& e_grid) {
    IsoclinePoints iso;
    const double k = p.net_env_gain();
    iso.vertical_linear = (k == 0.0);
    for (double e : e_grid) {
        if (!iso.vertical_linear) iso.linear.emplace_back(e, e / k);
        iso.logistic.emplace_back(e, broken_windows_prob(e, p));
    }
    return iso;
}

}  // namespace veblen

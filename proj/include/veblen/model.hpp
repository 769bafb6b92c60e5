// Core structural model: parameters, state, household first-order conditions
// (with and without a consumption tax), the logistic belief-update
// probability, and the reduced two-dimensional (e, pi) map
//
//   e'  = (pi/(1+pi)) * (e + K),      K = sigma*w - (sigma+gamma)*v*c_ref
//   pi' = alpha*pi + (1-alpha) / (1 + exp(-beta*e + rho))
//
// All functions are pure; ModelParams is immutable after construction.
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace veblen {

struct ModelParams {
    double alpha;        // inertia of green preferences, in (0,1)
    double beta;         // intensity of choice, > 0
    double rho;          // materialistic secular trend, >= 0
    double sigma;        // marginal conservation effectiveness, > 0
    double gamma;        // marginal consumption damage, > 0
    double w;            // wage / endowment, > 0
    double c_ref;        // reference-group consumption, >= 0
    double v;            // social-comparison weight, >= 0
    double tau = 0.0;    // consumption tax rate, >= 0

    // Net environmental gain per unit of preference share: the constant
    // bracket of the e-equation, sigma*w - (sigma+gamma)*v*c_ref.
    double net_env_gain() const { return sigma * w - (sigma + gamma) * v * c_ref; }

    void validate() const {
        auto fail = [](const std::string& msg) { throw std::invalid_argument("ModelParams: " + msg); };
        if (!(alpha > 0.0 && alpha < 1.0)) fail("alpha must be in (0,1)");
        if (!(beta > 0.0)) fail("beta must be > 0");
        if (!(rho >= 0.0)) fail("rho must be >= 0");
        if (!(sigma > 0.0)) fail("sigma must be > 0");
        if (!(gamma > 0.0)) fail("gamma must be > 0");
        if (!(w > 0.0)) fail("w must be > 0");
        if (!(c_ref >= 0.0)) fail("c_ref must be >= 0");
        if (!(v >= 0.0)) fail("v must be >= 0");
        if (!(tau >= 0.0)) fail("tau must be >= 0");
        if (!std::isfinite(net_env_gain())) fail("derived constant sigma*w-(sigma+gamma)*v*c_ref is not finite");
    }
};

struct State {
    double e;   // environmental quality
    double pi;  // green preference weight; must stay > -1
};

struct HouseholdChoice {
    double c;                // consumption
    double m;                // conservation investment
    double c_eff;            // effective consumption c - v*c_ref
    double overconsumption;  // Veblen term (pi/(1+pi))*v*c_ref
};

namespace detail {

// Logistic with the exponent clamped at +-700: saturates to 0/1 instead of
// producing inf/NaN, preserving monotonicity.
inline double safe_logistic(double x) {
    if (x > 700.0) x = 700.0;
    if (x < -700.0) x = -700.0;
    return 1.0 / (1.0 + std::exp(-x));
}

inline void require_pi_domain(double pi, const char* where) {
    if (!(pi > -1.0))
        throw std::domain_error(std::string(where) + ": pi must be > -1, got " + std::to_string(pi));
}

}  // namespace detail

// Probability of valuing the environment ("broken windows" response):
// 1/(1+exp(-beta*e+rho)). Strictly increasing in e, decreasing in rho.
inline double broken_windows_prob(double e, const ModelParams& p) {
    return detail::safe_logistic(p.beta * e - p.rho);
}

// Closed-form interior optimum of the household problem. With a consumption
// tax the denominator becomes gamma + sigma*(1+tau) and the m-numerator
// gamma*w - (1+tau)*e. Note the preference term of m keeps the untaxed
// weight (w - v*c_ref); this is exactly the split under which the induced
// e-transition is tax-free (see step_map_via_foc). As a consequence the
// realised pair satisfies (1+tau)*c + m = w + (pi/(1+pi))*tau*v*c_ref, i.e.
// the private budget holds exactly only for tau = 0 or v*c_ref = 0.
inline HouseholdChoice household_choice(const State& s, const ModelParams& p) {
    detail::require_pi_domain(s.pi, "household_choice");
    const double share = s.pi / (1.0 + s.pi);
    const double denom = (1.0 + s.pi) * (p.gamma + p.sigma * (1.0 + p.tau));
    const double veblen = p.v * p.c_ref;
    HouseholdChoice h;
    h.overconsumption = share * veblen;
    h.c = (p.sigma * p.w + s.e) / denom + h.overconsumption;
    h.m = (p.gamma * p.w - (1.0 + p.tau) * s.e) / denom + share * (p.w - veblen);
    h.c_eff = h.c - veblen;
    return h;
}

// Lifetime utility ln(c - v*c_ref) + pi*ln(e_next). Defined only on the
// interior region; outside it the FOCs above do not apply.
inline double utility(double c, double e_next, double pi, const ModelParams& p) {
    const double c_eff = c - p.v * p.c_ref;
    if (!(c_eff > 0.0)) throw std::domain_error("utility: effective consumption must be > 0");
    if (!(e_next > 0.0)) throw std::domain_error("utility: environmental quality must be > 0");
    return std::log(c_eff) + pi * std::log(e_next);
}

// One step of the reduced map. The closed form is tax-free regardless of
// tau: substituting the tax-adjusted FOCs into the environmental constraint
// reproduces the same expression (verified by step_map_via_foc).
inline State step_map(const State& s, const ModelParams& p) {
    detail::require_pi_domain(s.pi, "step_map");
    const double share = s.pi / (1.0 + s.pi);
    return State{share * (s.e + p.net_env_gain()),
                 p.alpha * s.pi + (1.0 - p.alpha) * broken_windows_prob(s.e, p)};
}

// Independent route for the e-transition: substitute the household optimum
// (with the stored tau) into e' = e - gamma*c + sigma*m. Exists solely as an
// oracle for the reduction algebra behind step_map.
inline State step_map_via_foc(const State& s, const ModelParams& p) {
    const HouseholdChoice h = household_choice(s, p);
    return State{s.e - p.gamma * h.c + p.sigma * h.m,
                 p.alpha * s.pi + (1.0 - p.alpha) * broken_windows_prob(s.e, p)};
}

}  // namespace veblen

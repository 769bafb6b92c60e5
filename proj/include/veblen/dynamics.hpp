// Orbit simulation, attractor sampling for orbit (bifurcation) diagrams, and
// a largest-Lyapunov-exponent estimator along the orbit.
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "veblen/model.hpp"
#include "veblen/stability.hpp"
#include "veblen/threads.hpp"

namespace veblen {

struct Orbit {
    State initial;
    ModelParams params;
    std::vector<State> points;  // the last `record` states, time-ordered
    std::size_t transient_discarded;
};

// Iterates the map transient+record times and keeps the last `record`
// states. A non-finite iterate aborts with the offending step index; the map
// is bounded for pi in [0,1], so this flags exotic inputs only.
inline Orbit simulate(const State& initial, const ModelParams& params, std::size_t transient,
                      std::size_t record) {
    detail::require_pi_domain(initial.pi, "simulate");
    Orbit orbit{initial, params, {}, transient};
    orbit.points.reserve(record);
    State s = initial;
    const std::size_t total = transient + record;
    for (std::size_t t = 0; t < total; ++t) {
        s = step_map(s, params);
        if (!std::isfinite(s.e) || !std::isfinite(s.pi))
            throw std::runtime_error("simulate: non-finite state at step " + std::to_string(t + 1));
        if (t >= transient) orbit.points.push_back(s);
    }
    return orbit;
}

enum class SweepMode { fixed_ic, continuation };

struct SweepResult {
    SweepParam sweep_param;
    std::vector<double> values;
    std::vector<std::vector<State>> samples;  // `record` attractor points per value
    SweepMode mode;
};

// Attractor samples against a swept parameter. Continuation follows the
// attractor along the grid (initial condition at k+1 = last recorded state
// at k); fixed-ic restarts each value from `initial` and runs grid values in
// parallel.
inline SweepResult orbit_diagram(const ModelParams& params, SweepParam sweep_param, double range_lo,
                                 double range_hi, std::size_t steps, SweepMode mode,
                                 std::size_t transient, std::size_t record,
                                 State initial = State{0.1, 0.5}, unsigned threads = 0) {
    if (steps < 2) throw std::invalid_argument("orbit_diagram: steps must be >= 2");
    if (!(range_hi > range_lo)) throw std::invalid_argument("orbit_diagram: empty range");
    SweepResult res{sweep_param, std::vector<double>(steps), std::vector<std::vector<State>>(steps), mode};
    for (std::size_t k = 0; k < steps; ++k)
        res.values[k] = range_lo + (range_hi - range_lo) * static_cast<double>(k) / static_cast<double>(steps - 1);

    if (mode == SweepMode::fixed_ic) {
        parallel_for(steps, threads, [&](std::size_t k) {
            res.samples[k] = simulate(initial, with_param(params, sweep_param, res.values[k]), transient,
                                      record).points;
        });
    } else {
        State carry = initial;
        for (std::size_t k = 0; k < steps; ++k) {
            res.samples[k] = simulate(carry, with_param(params, sweep_param, res.values[k]), transient,
                                      record).points;
            if (!res.samples[k].empty()) carry = res.samples[k].back();
        }
    }
    return res;
}

// Largest Lyapunov exponent: average log growth of a unit tangent vector
// propagated by the analytic Jacobian along the orbit, renormalised each
// step.
inline double lyapunov_largest(const State& initial, const ModelParams& params, std::size_t transient,
                               std::size_t horizon) {
    if (horizon < 1000) throw std::invalid_argument("lyapunov_largest: horizon must be >= 1000");
    State s = initial;
    for (std::size_t t = 0; t < transient; ++t) {
        s = step_map(s, params);
        if (!std::isfinite(s.e) || !std::isfinite(s.pi))
            throw std::runtime_error("lyapunov_largest: non-finite state at step " + std::to_string(t + 1));
    }
    double ve = 1.0, vp = 0.0, log_sum = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) {
        const Jacobian2 j = jacobian_at(s, params);
        const double we = j.j11 * ve + j.j12 * vp;
        const double wp = j.j21 * ve + j.j22 * vp;
        const double norm = std::hypot(we, wp);
        if (!(norm > 0.0) || !std::isfinite(norm))
            throw std::runtime_error("lyapunov_largest: degenerate tangent at step " + std::to_string(t + 1));
        log_sum += std::log(norm);
        ve = we / norm;
        vp = wp / norm;
        s = step_map(s, params);
        if (!std::isfinite(s.e) || !std::isfinite(s.pi))
            throw std::runtime_error("lyapunov_largest: non-finite state at step " + std::to_string(t + 1));
    }
    return log_sum / static_cast<double>(horizon);
}

}  // namespace veblen

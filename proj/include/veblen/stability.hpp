// Local stability analysis: analytic Jacobian, the preference elasticity
// eta = (e_bar/pi_bar) * d(pi')/d(e), the three trace/determinant stability
// margins, eigenvalues, and parameter-sweep bifurcation detection.
//
// At an equilibrium, with tr = pi/(1+pi) + alpha and det = (alpha*pi-eta)/(1+pi):
//   cond_fold = 1 - tr + det   (> 0  <=>  eta < 1-alpha)
//   cond_flip = 1 + tr + det   (> 0  <=>  eta < (1+alpha)(1+2*pi))
//   cond_ns   = 1 - det        (> 0  <=>  -(1+eta)/pi < 1-alpha)
// A margin crossing zero marks a Fold / Flip / Neimark-Sacker boundary.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "veblen/equilibria.hpp"
#include "veblen/model.hpp"

namespace veblen {

struct Jacobian2 {
    double j11, j12, j21, j22;
    double trace() const { return j11 + j22; }
    double det() const { return j11 * j22 - j12 * j21; }
};

// Valid at any state, not only at equilibria.
inline Jacobian2 jacobian_at(const State& s, const ModelParams& p) {
    detail::require_pi_domain(s.pi, "jacobian_at");
    const double one_plus = 1.0 + s.pi;
    const double prob = broken_windows_prob(s.e, p);
    return Jacobian2{s.pi / one_plus,
                     (s.e + p.net_env_gain()) / (one_plus * one_plus),
                     (1.0 - p.alpha) * p.beta * prob * (1.0 - prob),
                     p.alpha};
}

// Elasticity of green preferences w.r.t. environmental conditions at a
// steady state: (e_bar/pi_bar) * j21. Equals (1-alpha)*beta*e_bar*(1-pi_bar)
// through the logistic derivative identity.
inline double eta_at(const Equilibrium& eq, const ModelParams& p) {
    if (!(eq.pi_bar > 0.0)) throw std::domain_error("eta_at: pi_bar must be > 0");
    const Jacobian2 j = jacobian_at(State{eq.e_bar, eq.pi_bar}, p);
    return eq.e_bar / eq.pi_bar * j.j21;
}

enum class Verdict { stable, fold_unstable, flip_unstable, ns_unstable, unstable_multiple };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::stable: return "stable";
        case Verdict::fold_unstable: return "fold-unstable";
        case Verdict::flip_unstable: return "flip-unstable";
        case Verdict::ns_unstable: return "ns-unstable";
        case Verdict::unstable_multiple: return "unstable-multiple";
    }
    return "?";
}

struct StabilityReport {
    Jacobian2 jacobian;
    double trace, det;
    double eta;
    double cond_fold, cond_flip, cond_ns;
    std::array<std::complex<double>, 2> eigenvalues;
    Verdict verdict;
};

inline StabilityReport classify_equilibrium(const Equilibrium& eq, const ModelParams& p) {
    StabilityReport r;
    r.jacobian = jacobian_at(State{eq.e_bar, eq.pi_bar}, p);
    r.trace = r.jacobian.trace();
    r.det = r.jacobian.det();
    r.eta = eta_at(eq, p);

    // Margins in trace/determinant form, using the analytic identities so no
    // division by pi_bar occurs.
    const double one_plus = 1.0 + eq.pi_bar;
    const double tr = eq.pi_bar / one_plus + p.alpha;
    const double det = (p.alpha * eq.pi_bar - r.eta) / one_plus;
    r.cond_fold = 1.0 - tr + det;
    r.cond_flip = 1.0 + tr + det;
    r.cond_ns = 1.0 - det;

    const std::complex<double> disc = tr * tr - 4.0 * det;
    const std::complex<double> root = std::sqrt(disc);
    r.eigenvalues = {0.5 * (tr + root), 0.5 * (tr - root)};

    const bool f1 = r.cond_fold > 0.0, f2 = r.cond_flip > 0.0, f3 = r.cond_ns > 0.0;
    const int violations = (!f1) + (!f2) + (!f3);
    if (violations == 0) r.verdict = Verdict::stable;
    else if (violations >= 2) r.verdict = Verdict::unstable_multiple;
    else if (!f1) r.verdict = Verdict::fold_unstable;
    else if (!f2) r.verdict = Verdict::flip_unstable;
    else r.verdict = Verdict::ns_unstable;
    return r;
}

enum class SweepParam { alpha, beta, rho, sigma, gamma, w, c_ref, v };

inline const char* to_string(SweepParam s) {
    switch (s) {
        case SweepParam::alpha: return "alpha";
        case SweepParam::beta: return "beta";
        case SweepParam::rho: return "rho";
        case SweepParam::sigma: return "sigma";
        case SweepParam::gamma: return "gamma";
        case SweepParam::w: return "w";
        case SweepParam::c_ref: return "c_ref";
        case SweepParam::v: return "v";
    }
    return "?";
}

inline std::optional<SweepParam> parse_sweep_param(const std::string& name) {
    if (name == "alpha") return SweepParam::alpha;
    if (name == "beta") return SweepParam::beta;
    if (name == "rho") return SweepParam::rho;
    if (name == "sigma") return SweepParam::sigma;
    if (name == "gamma") return SweepParam::gamma;
    if (name == "w") return SweepParam::w;
    if (name == "c_ref") return SweepParam::c_ref;
    if (name == "v") return SweepParam::v;
    return std::nullopt;
}

inline ModelParams with_param(ModelParams p, SweepParam which, double value) {
    switch (which) {
        case SweepParam::alpha: p.alpha = value; break;
        case SweepParam::beta: p.beta = value; break;
        case SweepParam::rho: p.rho = value; break;
        case SweepParam::sigma: p.sigma = value; break;
        case SweepParam::gamma: p.gamma = value; break;
        case SweepParam::w: p.w = value; break;
        case SweepParam::c_ref: p.c_ref = value; break;
        case SweepParam::v: p.v = value; break;
    }
    return p;
}

enum class BifurcationType { fold, flip, neimark_sacker, pitchfork };

inline const char* to_string(BifurcationType t) {
    switch (t) {
        case BifurcationType::fold: return "Fold";
        case BifurcationType::flip: return "Flip";
        case BifurcationType::neimark_sacker: return "NS";
        case BifurcationType::pitchfork: return "Pitchfork";
    }
    return "?";
}

struct Crossing {
    double param_value;
    BifurcationType type;
};

struct DetectOptions {
    std::size_t scan_nodes = 10000;    // root-scan density per grid value
    double param_tol = 1e-10;          // bisection width on the swept parameter
    bool scan_attractor_doubling = true;
    // Attractor-doubling detector (period-doubled invariant curves show up as
    // two disjoint even/odd point clouds in the orbit).
    int doubling_transient = 4000;
    int doubling_record = 512;
    State doubling_ic{0.1, 0.5};
    double doubling_ratio = 0.03;      // even/odd separation relative to attractor size
};

namespace detail {

struct BranchPoint {
    double pi_bar;
    double margins[3];  // cond_fold, cond_flip, cond_ns
};

inline std::vector<BranchPoint> branch_points(const ModelParams& p, std::size_t scan_nodes) {
    std::vector<BranchPoint> pts;
    for (const Equilibrium& eq : find_equilibria(p, scan_nodes)) {
        const StabilityReport r = classify_equilibrium(eq, p);
        pts.push_back({eq.pi_bar, {r.cond_fold, r.cond_flip, r.cond_ns}});
    }
    return pts;
}

// Nearest root by pi_bar within the jump guard; nullopt when the branch has
// no continuation at this parameter value.
inline std::optional<BranchPoint> match_branch(const std::vector<BranchPoint>& pts, double pi_ref,
                                               double guard = 0.2) {
    std::optional<BranchPoint> best;
    for (const BranchPoint& bp : pts) {
        const double d = std::abs(bp.pi_bar - pi_ref);
        if (d <= guard && (!best || d < std::abs(best->pi_bar - pi_ref))) best = bp;
    }
    return best;
}

// Even/odd separation of the recorded orbit relative to its extent;
// > threshold marks a period-doubled curve. Returns the final state so a
// sweep can continue along the attractor.
inline double doubling_ratio_at(const ModelParams& p, State& io_state, const DetectOptions& opt) {
    State s = io_state;
    for (int t = 0; t < opt.doubling_transient; ++t) s = step_map(s, p);
    std::vector<State> pts;
    pts.reserve(static_cast<std::size_t>(opt.doubling_record));
    for (int t = 0; t < opt.doubling_record; ++t) {
        s = step_map(s, p);
        if (!std::isfinite(s.e) || !std::isfinite(s.pi)) return 0.0;
        pts.push_back(s);
    }
    io_state = s;
    double e_lo = pts[0].e, e_hi = pts[0].e, pi_lo = pts[0].pi, pi_hi = pts[0].pi;
    for (const State& q : pts) {
        e_lo = std::min(e_lo, q.e); e_hi = std::max(e_hi, q.e);
        pi_lo = std::min(pi_lo, q.pi); pi_hi = std::max(pi_hi, q.pi);
    }
    const double diam = std::max(e_hi - e_lo, pi_hi - pi_lo);
    if (diam < 1e-4) return 0.0;  // point attractor
    double min_d = diam;
    for (std::size_t i = 0; i < pts.size(); i += 2)
        for (std::size_t j = 1; j < pts.size(); j += 2) {
            const double d = std::max(std::abs(pts[i].e - pts[j].e), std::abs(pts[i].pi - pts[j].pi));
            if (d < min_d) min_d = d;
        }
    return min_d / diam;
}

}  // namespace detail

// Scans [range_lo, range_hi] with `steps` grid values and reports parameter
// values where an equilibrium branch crosses a stability boundary (margin
// sign change: Fold / Flip / NS), where the equilibrium count changes
// (tangency events, told apart as Fold vs Pitchfork by whether the merging
// pair collapses onto the remaining root), and where the attractor develops
// or loses a period-doubled structure (reported as Flip). Crossings are
// refined by bisection and returned in ascending parameter order.
inline std::vector<Crossing> detect_bifurcation(const ModelParams& params, SweepParam sweep_param,
                                                double range_lo, double range_hi, std::size_t steps,
                                                const DetectOptions& opt = {}) {
    if (steps < 2) throw std::invalid_argument("detect_bifurcation: steps must be >= 2");
    if (!(range_hi > range_lo)) throw std::invalid_argument("detect_bifurcation: empty range");

    std::vector<double> grid(steps);
    for (std::size_t k = 0; k < steps; ++k)
        grid[k] = range_lo + (range_hi - range_lo) * static_cast<double>(k) / static_cast<double>(steps - 1);

    std::vector<std::vector<detail::BranchPoint>> pts(steps);
    for (std::size_t k = 0; k < steps; ++k)
        pts[k] = detail::branch_points(with_param(params, sweep_param, grid[k]), opt.scan_nodes);

    std::vector<Crossing> out;

    // Margin sign changes along matched branches.
    static constexpr BifurcationType kMarginType[3] = {BifurcationType::fold, BifurcationType::flip,
                                                       BifurcationType::neimark_sacker};
    for (std::size_t k = 0; k + 1 < steps; ++k) {
        for (const detail::BranchPoint& a : pts[k]) {
            const auto b = detail::match_branch(pts[k + 1], a.pi_bar);
            if (!b) continue;
            for (int m = 0; m < 3; ++m) {
                if (a.margins[m] == 0.0 || std::signbit(a.margins[m]) == std::signbit(b->margins[m]))
                    continue;
                double lo = grid[k], hi = grid[k + 1];
                double pi_lo = a.pi_bar, pi_hi = b->pi_bar;
                double f_lo = a.margins[m];
                bool ok = true;
                while (hi - lo > opt.param_tol) {
                    const double mid = 0.5 * (lo + hi);
                    const auto mp = detail::match_branch(
                        detail::branch_points(with_param(params, sweep_param, mid), opt.scan_nodes),
                        0.5 * (pi_lo + pi_hi));
                    if (!mp) { ok = false; break; }
                    if (std::signbit(mp->margins[m]) == std::signbit(f_lo)) {
                        lo = mid; pi_lo = mp->pi_bar; f_lo = mp->margins[m];
                    } else {
                        hi = mid; pi_hi = mp->pi_bar;
                    }
                }
                if (ok) out.push_back({0.5 * (lo + hi), kMarginType[m]});
            }
        }
    }

    // Equilibrium-count changes (fold tangencies / pitchfork).
    for (std::size_t k = 0; k + 1 < steps; ++k) {
        if (pts[k].size() == pts[k + 1].size()) continue;
        double lo = grid[k], hi = grid[k + 1];
        const std::size_t n_lo = pts[k].size();
        while (hi - lo > opt.param_tol) {
            const double mid = 0.5 * (lo + hi);
            const std::size_t n_mid =
                detail::branch_points(with_param(params, sweep_param, mid), opt.scan_nodes).size();
            (n_mid == n_lo ? lo : hi) = mid;
        }
        // Inspect the many-root side just past the crossing: the merging pair
        // is the closest pair; a pitchfork collapses it onto the middle root.
        const bool many_on_right = pts[k + 1].size() > pts[k].size();
        const double probe = many_on_right ? hi : lo;
        const auto side = detail::branch_points(with_param(params, sweep_param, probe), opt.scan_nodes);
        BifurcationType type = BifurcationType::fold;
        if (side.size() >= 3) {
            std::size_t im = 0;
            double gap = std::abs(side[1].pi_bar - side[0].pi_bar);
            for (std::size_t i = 1; i + 1 < side.size(); ++i) {
                const double g = std::abs(side[i + 1].pi_bar - side[i].pi_bar);
                if (g < gap) { gap = g; im = i; }
            }
            const double pair_mid = 0.5 * (side[im].pi_bar + side[im + 1].pi_bar);
            for (std::size_t i = 0; i < side.size(); ++i) {
                if (i == im || i == im + 1) continue;
                if (std::abs(side[i].pi_bar - pair_mid) < 1e-2) type = BifurcationType::pitchfork;
            }
        }
        out.push_back({0.5 * (lo + hi), type});
    }

    // Attractor doubling (sequential continuation along the grid).
    if (opt.scan_attractor_doubling) {
        std::vector<double> ratio(steps);
        std::vector<State> last(steps);
        State carry = opt.doubling_ic;
        for (std::size_t k = 0; k < steps; ++k) {
            ratio[k] = detail::doubling_ratio_at(with_param(params, sweep_param, grid[k]), carry, opt);
            last[k] = carry;
        }
        for (std::size_t k = 0; k + 1 < steps; ++k) {
            const bool d_lo = ratio[k] > opt.doubling_ratio;
            if (d_lo == (ratio[k + 1] > opt.doubling_ratio)) continue;
            double lo = grid[k], hi = grid[k + 1];
            while (hi - lo > std::max(opt.param_tol, 1e-9)) {
                const double mid = 0.5 * (lo + hi);
                State s = last[k];
                const double r = detail::doubling_ratio_at(with_param(params, sweep_param, mid), s, opt);
                ((r > opt.doubling_ratio) == d_lo ? lo : hi) = mid;
            }
            out.push_back({0.5 * (lo + hi), BifurcationType::flip});
        }
    }

    std::sort(out.begin(), out.end(),
              [](const Crossing& a, const Crossing& b) { return a.param_value < b.param_value; });
    return out;
}

}  // namespace veblen

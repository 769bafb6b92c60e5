// Experiment front end shared by the CLI and the tests: configuration with
// figure presets, JSON config loading (unknown keys rejected), and the
// command runners that write the CSV/PNG artifacts.
#pragma once

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "veblen/basins.hpp"
#include "veblen/csv.hpp"
#include "veblen/dynamics.hpp"
#include "veblen/equilibria.hpp"
#include "veblen/model.hpp"
#include "veblen/png.hpp"
#include "veblen/stability.hpp"

namespace veblen {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SweepSettings {
    std::string param = "v";
    double min = 0.05;
    double max = 1.2;
    std::size_t steps = 400;
    std::string mode = "continuation";  // or "fixed-ic"
};

struct BasinSettings {
    double e_min = 0.0, e_max = 1.0;
    double pi_min = 0.0, pi_max = 1.0;
    std::size_t resolution = 400;
    std::size_t max_iter = 100000;
    double capture_radius = 1e-6;
};

struct IsoclineSettings {
    double e_min = -1.0, e_max = 1.0;
    std::size_t points = 513;
};

struct ExperimentConfig {
    ModelParams params{0.9, 10.0, 0.0, 0.75, 1.5, 1.0, 1.0, 0.1, 0.0};
    double e0 = 0.1, pi0 = 0.5;
    std::size_t transient = 2000;
    std::size_t record = 500;
    SweepSettings sweep;
    BasinSettings basin;
    IsoclineSettings isoclines;
    long long trials = 10000;
    std::uint64_t seed = 0xb5eb1en;
    unsigned threads = 0;  // 0 = hardware concurrency
    std::string out_dir = "out";
    bool png = false;
};

// The figure presets fix the parameter set of each published scenario plus
// the sweep/raster settings that scenario is normally run with.
inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"fig4a", "fig4b", "fig5", "fig6",
                                                   "fig7a", "fig7b", "fig8a", "fig8b"};
    return names;
}

inline void apply_preset(ExperimentConfig& cfg, const std::string& name) {
    auto strong_family = [&](double alpha, double beta) {
        cfg.params = ModelParams{alpha, beta, 0.0, 0.75, 1.5, 1.0, 3.0, 0.05, 0.0};
        cfg.sweep = SweepSettings{"v", 0.05, 1.2, 400, "continuation"};
    };
    auto weak_family = [&](double alpha, double rho) {
        cfg.params = ModelParams{alpha, 10.0, rho, 0.75, 1.5, 1.0, 1.0, 0.1, 0.0};
        cfg.basin = BasinSettings{};
    };
    if (name == "fig4a") strong_family(0.75, 100.0);
    else if (name == "fig4b") strong_family(0.75, 1000.0);
    else if (name == "fig5") strong_family(0.49, 100.0);
    else if (name == "fig6") {
        cfg.params = ModelParams{0.3, 10.0, 0.0, 0.75, 1.5, 1.0, 3.0, 1.0, 0.0};
        cfg.sweep = SweepSettings{"alpha", 0.05, 0.95, 400, "continuation"};
    } else if (name == "fig7a") weak_family(0.9, 0.0);
    else if (name == "fig7b") weak_family(0.9, 2.6);
    else if (name == "fig8a") weak_family(0.5, 2.6);
    else if (name == "fig8b") weak_family(0.75, 2.6);
    else throw ConfigError("unknown preset '" + name + "'");
}

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& j, const std::vector<std::string>& allowed, const std::string& where) {
    for (const auto& item : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
            throw ConfigError("unknown config key '" + item.key() + "' in " + where);
    }
}

template <typename T>
void fetch(const json& j, const char* key, T& target) {
    if (!j.contains(key)) return;
    try {
        target = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config key '") + key + "' has the wrong type");
    }
}

}  // namespace detail

inline void apply_config_json(ExperimentConfig& cfg, const nlohmann::json& j) {
    using detail::fetch;
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    detail::reject_unknown(j,
                           {"preset", "alpha", "beta", "rho", "sigma", "gamma", "w", "c_ref", "v", "tau",
                            "e0", "pi0", "transient", "record", "sweep", "basin", "isoclines", "trials",
                            "seed", "threads", "out", "png"},
                           "config root");
    fetch(j, "alpha", cfg.params.alpha);
    fetch(j, "beta", cfg.params.beta);
    fetch(j, "rho", cfg.params.rho);
    fetch(j, "sigma", cfg.params.sigma);
    fetch(j, "gamma", cfg.params.gamma);
    fetch(j, "w", cfg.params.w);
    fetch(j, "c_ref", cfg.params.c_ref);
    fetch(j, "v", cfg.params.v);
    fetch(j, "tau", cfg.params.tau);
    fetch(j, "e0", cfg.e0);
    fetch(j, "pi0", cfg.pi0);
    fetch(j, "transient", cfg.transient);
    fetch(j, "record", cfg.record);
    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        detail::reject_unknown(s, {"param", "min", "max", "steps", "mode"}, "sweep");
        fetch(s, "param", cfg.sweep.param);
        fetch(s, "min", cfg.sweep.min);
        fetch(s, "max", cfg.sweep.max);
        fetch(s, "steps", cfg.sweep.steps);
        fetch(s, "mode", cfg.sweep.mode);
    }
    if (j.contains("basin")) {
        const auto& b = j.at("basin");
        detail::reject_unknown(
            b, {"e_min", "e_max", "pi_min", "pi_max", "resolution", "max_iter", "capture_radius"}, "basin");
        fetch(b, "e_min", cfg.basin.e_min);
        fetch(b, "e_max", cfg.basin.e_max);
        fetch(b, "pi_min", cfg.basin.pi_min);
        fetch(b, "pi_max", cfg.basin.pi_max);
        fetch(b, "resolution", cfg.basin.resolution);
        fetch(b, "max_iter", cfg.basin.max_iter);
        fetch(b, "capture_radius", cfg.basin.capture_radius);
    }
    if (j.contains("isoclines")) {
        const auto& i = j.at("isoclines");
        detail::reject_unknown(i, {"e_min", "e_max", "points"}, "isoclines");
        fetch(i, "e_min", cfg.isoclines.e_min);
        fetch(i, "e_max", cfg.isoclines.e_max);
        fetch(i, "points", cfg.isoclines.points);
    }
    fetch(j, "trials", cfg.trials);
    fetch(j, "seed", cfg.seed);
    fetch(j, "threads", cfg.threads);
    fetch(j, "out", cfg.out_dir);
    fetch(j, "png", cfg.png);
}

inline nlohmann::json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
}

inline void validate_config(const ExperimentConfig& cfg) {
    try {
        cfg.params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (!(cfg.pi0 > -1.0)) throw ConfigError("pi0 must be > -1");
    if (!parse_sweep_param(cfg.sweep.param)) throw ConfigError("unknown sweep param '" + cfg.sweep.param + "'");
    if (cfg.sweep.mode != "continuation" && cfg.sweep.mode != "fixed-ic")
        throw ConfigError("sweep mode must be 'continuation' or 'fixed-ic'");
    if (cfg.sweep.steps < 2) throw ConfigError("sweep steps must be >= 2");
    if (!(cfg.sweep.max > cfg.sweep.min)) throw ConfigError("sweep range is empty");
    if (cfg.basin.resolution < 1) throw ConfigError("basin resolution must be >= 1");
    if (!(cfg.basin.e_max > cfg.basin.e_min) || !(cfg.basin.pi_max > cfg.basin.pi_min))
        throw ConfigError("basin rectangle is empty");
    if (cfg.isoclines.points < 2) throw ConfigError("isocline points must be >= 2");
    if (!(cfg.isoclines.e_max > cfg.isoclines.e_min)) throw ConfigError("isocline range is empty");
}

namespace detail {

inline std::filesystem::path ensure_out_dir(const ExperimentConfig& cfg) {
    std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

struct Range {
    double lo = 0.0, hi = 1.0;
    void widen(double x) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    static Range of(const std::vector<double>& xs) {
        Range r{xs.empty() ? 0.0 : xs.front(), xs.empty() ? 1.0 : xs.front()};
        for (double x : xs) r.widen(x);
        if (!(r.hi > r.lo)) {
            r.lo -= 0.5;
            r.hi += 0.5;
        }
        const double pad = 0.05 * (r.hi - r.lo);
        r.lo -= pad;
        r.hi += pad;
        return r;
    }
};

constexpr Rgb kBlue{38, 84, 164};
constexpr Rgb kOrange{230, 140, 30};
constexpr Rgb kRed{205, 60, 50};
constexpr Rgb kGreen{40, 150, 70};
constexpr Rgb kGrey{210, 210, 210};

inline Rgb attractor_colour(std::size_t index, std::size_t count) {
    if (count <= 1) return kGreen;
    if (index == 0) return kRed;
    if (index + 1 == count) return kGreen;
    return kBlue;
}

}  // namespace detail

// simulate: orbit.csv with columns t,e,pi (t counts map applications from
// the initial state, so the first recorded row has t = transient+1).
inline void run_simulate(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const auto dir = detail::ensure_out_dir(cfg);
    const Orbit orbit = simulate(State{cfg.e0, cfg.pi0}, cfg.params, cfg.transient, cfg.record);

    CsvWriter csv((dir / "orbit.csv").string());
    csv.header("t,e,pi");
    for (std::size_t i = 0; i < orbit.points.size(); ++i) {
        csv.field(static_cast<long long>(cfg.transient + i + 1));
        csv.field(orbit.points[i].e);
        csv.field(orbit.points[i].pi);
        csv.end_row();
    }
    csv.close();

    if (cfg.png && !orbit.points.empty()) {
        std::vector<double> ts, es, pis;
        for (std::size_t i = 0; i < orbit.points.size(); ++i) {
            ts.push_back(static_cast<double>(cfg.transient + i + 1));
            es.push_back(orbit.points[i].e);
            pis.push_back(orbit.points[i].pi);
        }
        const auto rt = detail::Range::of(ts), re = detail::Range::of(es), rp = detail::Range::of(pis);
        // Two stacked panels: e on top, pi below.
        Canvas img(900, 601);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const double fy_e = (es[i] - re.lo) / (re.hi - re.lo);
            const double fy_p = (pis[i] - rp.lo) / (rp.hi - rp.lo);
            const double fx = (ts[i] - rt.lo) / (rt.hi - rt.lo);
            img.set(static_cast<std::size_t>(fx * 899 + 0.5),
                    static_cast<std::size_t>((1.0 - fy_e) * 299 + 0.5), detail::kBlue);
            img.set(static_cast<std::size_t>(fx * 899 + 0.5),
                    301 + static_cast<std::size_t>((1.0 - fy_p) * 299 + 0.5), detail::kOrange);
        }
        img.save((dir / "orbit.png").string());
    }
}

// equilibria: equilibria.csv with per-root stability summary, ascending pi_bar.
inline void run_equilibria(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const auto dir = detail::ensure_out_dir(cfg);
    CsvWriter csv((dir / "equilibria.csv").string());
    csv.header("e_bar,pi_bar,eta,trace,det,verdict,label");
    for (const Equilibrium& eq : find_equilibria(cfg.params)) {
        const StabilityReport r = classify_equilibrium(eq, cfg.params);
        csv.field(eq.e_bar);
        csv.field(eq.pi_bar);
        csv.field(r.eta);
        csv.field(r.trace);
        csv.field(r.det);
        csv.field(std::string(to_string(r.verdict)));
        csv.field(std::string(to_string(eq.label)));
        csv.end_row();
    }
    csv.close();
}

// bifurcation: sweep.csv (attractor samples) + crossings.csv (+ sweep.png).
inline void run_bifurcation(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const auto dir = detail::ensure_out_dir(cfg);
    const SweepParam param = *parse_sweep_param(cfg.sweep.param);
    const SweepMode mode = cfg.sweep.mode == "fixed-ic" ? SweepMode::fixed_ic : SweepMode::continuation;

    const SweepResult sweep = orbit_diagram(cfg.params, param, cfg.sweep.min, cfg.sweep.max,
                                            cfg.sweep.steps, mode, cfg.transient, cfg.record,
                                            State{cfg.e0, cfg.pi0}, cfg.threads);
    CsvWriter samples((dir / "sweep.csv").string());
    samples.header("param_value,e,pi");
    for (std::size_t k = 0; k < sweep.values.size(); ++k)
        for (const State& s : sweep.samples[k]) {
            samples.field(sweep.values[k]);
            samples.field(s.e);
            samples.field(s.pi);
            samples.end_row();
        }
    samples.close();

    const std::vector<Crossing> crossings =
        detect_bifurcation(cfg.params, param, cfg.sweep.min, cfg.sweep.max, cfg.sweep.steps);
    CsvWriter cr((dir / "crossings.csv").string());
    cr.header("param_value,type");
    for (const Crossing& c : crossings) {
        cr.field(c.param_value);
        cr.field(std::string(to_string(c.type)));
        cr.end_row();
    }
    cr.close();

    if (cfg.png) {
        std::vector<double> es, pis;
        for (const auto& block : sweep.samples)
            for (const State& s : block) {
                es.push_back(s.e);
                pis.push_back(s.pi);
            }
        const auto re = detail::Range::of(es), rp = detail::Range::of(pis);
        Canvas img(1000, 601);
        for (const Crossing& c : crossings) {
            const double fx = (c.param_value - cfg.sweep.min) / (cfg.sweep.max - cfg.sweep.min);
            if (fx < 0.0 || fx > 1.0) continue;
            const auto px = static_cast<std::size_t>(fx * 999 + 0.5);
            for (std::size_t y = 0; y < 601; ++y) img.set(px, y, detail::kGrey);
        }
        for (std::size_t k = 0; k < sweep.values.size(); ++k) {
            const double fx = (sweep.values[k] - cfg.sweep.min) / (cfg.sweep.max - cfg.sweep.min);
            const auto px = static_cast<std::size_t>(fx * 999 + 0.5);
            for (const State& s : sweep.samples[k]) {
                const double fe = (s.e - re.lo) / (re.hi - re.lo);
                const double fp = (s.pi - rp.lo) / (rp.hi - rp.lo);
                if (fe >= 0.0 && fe <= 1.0)
                    img.set(px, static_cast<std::size_t>((1.0 - fe) * 299 + 0.5), detail::kBlue);
                if (fp >= 0.0 && fp <= 1.0)
                    img.set(px, 301 + static_cast<std::size_t>((1.0 - fp) * 299 + 0.5), detail::kOrange);
            }
        }
        img.save((dir / "sweep.png").string());
    }
}

// basin: basin_labels.csv (row-major label matrix), basin_summary.csv
// (fractions + component counts), and the coloured raster when --png.
inline void run_basin(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const auto dir = detail::ensure_out_dir(cfg);
    const BasinGrid grid =
        compute_basins(cfg.params, cfg.basin.e_min, cfg.basin.e_max, cfg.basin.pi_min, cfg.basin.pi_max,
                       cfg.basin.resolution, cfg.basin.max_iter, cfg.basin.capture_radius, cfg.threads);
    if (!grid.multistable)
        std::cerr << "note: fewer than two stable attractors; basin raster is trivially coloured\n";

    CsvWriter labels((dir / "basin_labels.csv").string());
    labels.comment("e_min=" + csv_number(grid.e_min) + " e_max=" + csv_number(grid.e_max) +
                   " pi_min=" + csv_number(grid.pi_min) + " pi_max=" + csv_number(grid.pi_max) +
                   " resolution=" + std::to_string(grid.resolution) +
                   " attractors=" + std::to_string(grid.attractors.size()) +
                   " rows=pi_ascending cols=e_ascending unconverged=-1");
    for (std::size_t row = 0; row < grid.resolution; ++row) {
        for (std::size_t col = 0; col < grid.resolution; ++col)
            labels.field(static_cast<long long>(grid.labels[grid.index(row, col)]));
        labels.end_row();
    }
    labels.close();

    const BasinFractions fr = basin_area_fractions(grid);
    CsvWriter summary((dir / "basin_summary.csv").string());
    summary.header("attractor,label,e_bar,pi_bar,area_fraction,components");
    for (std::size_t a = 0; a < grid.attractors.size(); ++a) {
        summary.field(static_cast<long long>(a));
        summary.field(std::string(to_string(grid.attractors[a].label)));
        summary.field(grid.attractors[a].e_bar);
        summary.field(grid.attractors[a].pi_bar);
        summary.field(fr.per_attractor[a]);
        summary.field(static_cast<long long>(connected_components(grid, static_cast<std::int16_t>(a))));
        summary.end_row();
    }
    summary.field(static_cast<long long>(-1));
    summary.field(std::string("unconverged"));
    summary.field(std::string(""));
    summary.field(std::string(""));
    summary.field(fr.unconverged);
    summary.field(static_cast<long long>(connected_components(grid, BasinGrid::kUnconverged)));
    summary.end_row();
    summary.close();

    if (cfg.png) {
        Canvas img(grid.resolution, grid.resolution);
        for (std::size_t row = 0; row < grid.resolution; ++row)
            for (std::size_t col = 0; col < grid.resolution; ++col) {
                const std::int16_t lab = grid.labels[grid.index(row, col)];
                if (lab == BasinGrid::kUnconverged) continue;  // white
                img.set(col, grid.resolution - 1 - row,
                        detail::attractor_colour(static_cast<std::size_t>(lab), grid.attractors.size()));
            }
        img.save((dir / "basin_labels.png").string());
    }
}

// tax-check: compares the FOC-substituted transition against the closed-form
// map over random admissible draws; prints the worst deviation. Returns true
// when the maximum componentwise deviation stays within 1e-10.
inline bool run_tax_check(const ExperimentConfig& cfg, std::ostream& out = std::cout) {
    if (cfg.trials < 1) throw ConfigError("tax-check requires trials >= 1");
    validate_config(cfg);
    std::mt19937_64 gen(cfg.seed);
    auto uniform = [&](double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(gen() >> 11) * 0x1.0p-53);
    };
    double worst = 0.0;
    for (long long t = 0; t < cfg.trials; ++t) {
        ModelParams p{};
        p.alpha = uniform(0.05, 0.95);
        p.beta = uniform(0.1, 50.0);
        p.rho = uniform(0.0, 5.0);
        p.sigma = uniform(0.1, 3.0);
        p.gamma = uniform(0.1, 3.0);
        p.w = uniform(0.2, 3.0);
        p.c_ref = uniform(0.0, 3.0);
        p.v = uniform(0.0, 1.5);
        p.tau = uniform(0.0, 10.0);
        const State s{uniform(-3.0, 3.0), uniform(-0.5, 1.5)};
        const State a = step_map(s, p);
        const State b = step_map_via_foc(s, p);
        worst = std::max({worst, std::abs(a.e - b.e), std::abs(a.pi - b.pi)});
    }
    const bool ok = worst <= 1e-10;
    out << "tax-check: trials=" << cfg.trials << " max|deviation|=" << csv_number(worst)
        << " threshold=1e-10 -> " << (ok ? "OK" : "FAIL") << "\n";
    return ok;
}

// isoclines: isoclines.csv with the linear isocline pi = e/K (empty column
// when K = 0, i.e. the isocline degenerates to the vertical line e = 0) and
// the logistic isocline.
inline void run_isoclines(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const auto dir = detail::ensure_out_dir(cfg);
    std::vector<double> e_grid(cfg.isoclines.points);
    for (std::size_t i = 0; i < e_grid.size(); ++i)
        e_grid[i] = cfg.isoclines.e_min + (cfg.isoclines.e_max - cfg.isoclines.e_min) *
                                              static_cast<double>(i) / static_cast<double>(e_grid.size() - 1);
    const IsoclinePoints iso = isocline_points(cfg.params, e_grid);
    if (iso.vertical_linear) std::cerr << "note: K = 0, the linear isocline is the vertical line e = 0\n";

    CsvWriter csv((dir / "isoclines.csv").string());
    csv.header("e,pi_linear,pi_logistic");
    for (std::size_t i = 0; i < e_grid.size(); ++i) {
        csv.field(e_grid[i]);
        if (iso.vertical_linear) csv.field(std::string(""));
        else csv.field(iso.linear[i].second);
        csv.field(iso.logistic[i].second);
        csv.end_row();
    }
    csv.close();

    if (cfg.png) {
        Canvas img(800, 600);
        const double pi_lo = -0.05, pi_hi = 1.05;
        for (std::size_t i = 0; i < e_grid.size(); ++i) {
            if (!iso.vertical_linear)
                img.plot(e_grid[i], iso.linear[i].second, cfg.isoclines.e_min, cfg.isoclines.e_max, pi_lo,
                         pi_hi, detail::kBlue);
            img.plot(e_grid[i], iso.logistic[i].second, cfg.isoclines.e_min, cfg.isoclines.e_max, pi_lo,
                     pi_hi, detail::kOrange);
        }
        for (const Equilibrium& eq : find_equilibria(cfg.params))
            for (int dx = -1; dx <= 1; ++dx)
                for (int dy = -1; dy <= 1; ++dy)
                    img.plot(eq.e_bar + dx * (cfg.isoclines.e_max - cfg.isoclines.e_min) / 800.0,
                             eq.pi_bar + dy * (pi_hi - pi_lo) / 600.0, cfg.isoclines.e_min,
                             cfg.isoclines.e_max, pi_lo, pi_hi, Rgb{0, 0, 0});
        img.save((dir / "isoclines.png").string());
    }
}

}  // namespace veblen

// veblen-dyn: command-line front end for the environmental preference map.
//
// Subcommands: simulate | equilibria | bifurcation | basin | tax-check | isoclines
// Exit codes:  0 success, 1 check failure, 2 config error, 3 runtime error.
#include <CLI11.hpp>

#include <clocale>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "veblen/experiment.hpp"

namespace {

struct Overrides {
    std::optional<std::string> config, preset;
    std::optional<double> alpha, beta, rho, sigma, gamma, w, c_ref, v, tau;
    std::optional<double> e0, pi0;
    std::optional<std::size_t> transient, record;
    std::optional<std::string> sweep_param, mode;
    std::optional<double> sweep_min, sweep_max;
    std::optional<std::size_t> sweep_steps;
    std::optional<double> e_min, e_max, pi_min, pi_max, capture_radius;
    std::optional<std::size_t> resolution, max_iter, points;
    std::optional<long long> trials;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::string> out;
    bool png = false;
};

template <typename T>
void maybe(T& target, const std::optional<T>& src) {
    if (src) target = *src;
}

veblen::ExperimentConfig build_config(const Overrides& o) {
    veblen::ExperimentConfig cfg;
    nlohmann::json file_json;
    if (o.config) file_json = veblen::load_config_file(*o.config);

    std::string preset;
    if (file_json.is_object() && file_json.contains("preset")) {
        if (!file_json.at("preset").is_string())
            throw veblen::ConfigError("config key 'preset' must be a string");
        preset = file_json.at("preset").get<std::string>();
    }
    if (o.preset) preset = *o.preset;
    if (!preset.empty()) veblen::apply_preset(cfg, preset);
    if (file_json.is_object()) veblen::apply_config_json(cfg, file_json);

    maybe(cfg.params.alpha, o.alpha);
    maybe(cfg.params.beta, o.beta);
    maybe(cfg.params.rho, o.rho);
    maybe(cfg.params.sigma, o.sigma);
    maybe(cfg.params.gamma, o.gamma);
    maybe(cfg.params.w, o.w);
    maybe(cfg.params.c_ref, o.c_ref);
    maybe(cfg.params.v, o.v);
    maybe(cfg.params.tau, o.tau);
    maybe(cfg.e0, o.e0);
    maybe(cfg.pi0, o.pi0);
    maybe(cfg.transient, o.transient);
    maybe(cfg.record, o.record);
    maybe(cfg.sweep.param, o.sweep_param);
    maybe(cfg.sweep.min, o.sweep_min);
    maybe(cfg.sweep.max, o.sweep_max);
    maybe(cfg.sweep.steps, o.sweep_steps);
    maybe(cfg.sweep.mode, o.mode);
    maybe(cfg.basin.e_min, o.e_min);
    maybe(cfg.basin.e_max, o.e_max);
    maybe(cfg.basin.pi_min, o.pi_min);
    maybe(cfg.basin.pi_max, o.pi_max);
    maybe(cfg.basin.resolution, o.resolution);
    maybe(cfg.basin.max_iter, o.max_iter);
    maybe(cfg.basin.capture_radius, o.capture_radius);
    maybe(cfg.isoclines.points, o.points);
    if (o.e_min) cfg.isoclines.e_min = *o.e_min;
    if (o.e_max) cfg.isoclines.e_max = *o.e_max;
    maybe(cfg.trials, o.trials);
    maybe(cfg.seed, o.seed);
    maybe(cfg.threads, o.threads);
    maybe(cfg.out_dir, o.out);
    if (o.png) cfg.png = true;

    if (!o.threads && !(file_json.is_object() && file_json.contains("threads"))) {
        if (const char* env = std::getenv("VEBLEN_DYN_THREADS")) {
            try {
                cfg.threads = static_cast<unsigned>(std::stoul(env));
            } catch (const std::exception&) {
                throw veblen::ConfigError("VEBLEN_DYN_THREADS is not a number");
            }
        }
    }
    return cfg;
}

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON config file");
    cmd->add_option("--preset", o.preset, "figure preset (fig4a fig4b fig5 fig6 fig7a fig7b fig8a fig8b)");
    cmd->add_option("--alpha", o.alpha, "preference inertia");
    cmd->add_option("--beta", o.beta, "intensity of choice");
    cmd->add_option("--rho", o.rho, "materialistic trend");
    cmd->add_option("--sigma", o.sigma, "conservation effectiveness");
    cmd->add_option("--gamma", o.gamma, "consumption damage");
    cmd->add_option("--w", o.w, "wage endowment");
    cmd->add_option("--c-ref", o.c_ref, "reference-group consumption");
    cmd->add_option("--v", o.v, "social-comparison weight");
    cmd->add_option("--tau", o.tau, "consumption tax rate");
    cmd->add_option("--threads", o.threads, "worker cap (0 = hardware)");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_flag("--png", o.png, "also write PNG plots");
}

}  // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");
    CLI::App app{"numerical laboratory for the two-dimensional environmental preference map"};
    app.require_subcommand(1);
    Overrides o;

    CLI::App* sim = app.add_subcommand("simulate", "iterate the map and write orbit.csv");
    sim->add_option("--e0", o.e0, "initial environmental quality");
    sim->add_option("--pi0", o.pi0, "initial preference weight");
    sim->add_option("--transient", o.transient, "discarded steps");
    sim->add_option("--record", o.record, "recorded steps");
    add_common(sim, o);

    CLI::App* eq = app.add_subcommand("equilibria", "find and classify all steady states");
    add_common(eq, o);

    CLI::App* bif = app.add_subcommand("bifurcation", "orbit diagram and bifurcation crossings");
    bif->add_option("--sweep-param", o.sweep_param, "parameter to sweep");
    bif->add_option("--sweep-min", o.sweep_min, "sweep lower bound");
    bif->add_option("--sweep-max", o.sweep_max, "sweep upper bound");
    bif->add_option("--sweep-steps", o.sweep_steps, "grid values");
    bif->add_option("--mode", o.mode, "continuation | fixed-ic");
    bif->add_option("--e0", o.e0, "fixed-ic initial e");
    bif->add_option("--pi0", o.pi0, "fixed-ic initial pi");
    bif->add_option("--transient", o.transient, "discarded steps per value");
    bif->add_option("--record", o.record, "recorded steps per value");
    add_common(bif, o);

    CLI::App* bas = app.add_subcommand("basin", "rasterise basins of attraction");
    bas->add_option("--e-min", o.e_min, "rectangle e lower bound");
    bas->add_option("--e-max", o.e_max, "rectangle e upper bound");
    bas->add_option("--pi-min", o.pi_min, "rectangle pi lower bound");
    bas->add_option("--pi-max", o.pi_max, "rectangle pi upper bound");
    bas->add_option("--resolution", o.resolution, "cells per axis");
    bas->add_option("--max-iter", o.max_iter, "iteration budget per cell");
    bas->add_option("--capture-radius", o.capture_radius, "max-norm capture radius");
    add_common(bas, o);

    CLI::App* tax = app.add_subcommand("tax-check", "verify the tax-free reduced transition");
    tax->add_option("--trials", o.trials, "random draws");
    tax->add_option("--seed", o.seed, "RNG seed");
    add_common(tax, o);

    CLI::App* iso = app.add_subcommand("isoclines", "sample both steady-state isoclines");
    iso->add_option("--e-min", o.e_min, "grid lower bound");
    iso->add_option("--e-max", o.e_max, "grid upper bound");
    iso->add_option("--points", o.points, "grid points");
    add_common(iso, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        const veblen::ExperimentConfig cfg = build_config(o);
        if (sim->parsed()) veblen::run_simulate(cfg);
        else if (eq->parsed()) veblen::run_equilibria(cfg);
        else if (bif->parsed()) veblen::run_bifurcation(cfg);
        else if (bas->parsed()) veblen::run_basin(cfg);
        else if (iso->parsed()) veblen::run_isoclines(cfg);
        else if (tax->parsed()) {
            if (!veblen::run_tax_check(cfg)) return 1;
        }
    } catch (const veblen::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

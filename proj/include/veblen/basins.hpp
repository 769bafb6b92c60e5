// Basin-of-attraction rasterisation over a rectangle of initial conditions.
// Each cell centre is iterated until it lands within the capture radius of a
// stable equilibrium (max-norm) or the iteration budget runs out. Per-cell
// work is independent, so the label array never depends on the thread count.
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "veblen/equilibria.hpp"
#include "veblen/stability.hpp"
#include "veblen/threads.hpp"

namespace veblen {

struct BasinGrid {
    double e_min, e_max, pi_min, pi_max;
    std::size_t resolution;               // cells per axis
    std::vector<Equilibrium> attractors;  // stable equilibria, ascending pi_bar
    std::vector<std::int16_t> labels;     // row-major [pi_row][e_col]; -1 = unconverged
    std::vector<std::int32_t> iterations; // steps to converge; -1 when unconverged
    double capture_radius;
    std::size_t max_iter;
    bool multistable;                     // >= 2 stable attractors found

    static constexpr std::int16_t kUnconverged = -1;

    std::size_t index(std::size_t pi_row, std::size_t e_col) const { return pi_row * resolution + e_col; }
    double cell_e(std::size_t e_col) const {
        return e_min + (e_max - e_min) * (static_cast<double>(e_col) + 0.5) / static_cast<double>(resolution);
    }
    double cell_pi(std::size_t pi_row) const {
        return pi_min + (pi_max - pi_min) * (static_cast<double>(pi_row) + 0.5) / static_cast<double>(resolution);
    }
};

inline BasinGrid compute_basins(const ModelParams& params, double e_min, double e_max, double pi_min,
                                double pi_max, std::size_t resolution, std::size_t max_iter = 100000,
                                double capture_radius = 1e-6, unsigned threads = 0) {
    if (resolution < 1) throw std::invalid_argument("compute_basins: resolution must be >= 1");
    if (!(e_max > e_min) || !(pi_max > pi_min)) throw std::invalid_argument("compute_basins: empty rectangle");

    BasinGrid grid{e_min, e_max, pi_min, pi_max, resolution, {}, {}, {},
                   capture_radius, max_iter, false};
    for (const Equilibrium& eq : find_equilibria(params))
        if (classify_equilibrium(eq, params).verdict == Verdict::stable) grid.attractors.push_back(eq);
    grid.multistable = grid.attractors.size() >= 2;

    const std::size_t cells = resolution * resolution;
    grid.labels.assign(cells, BasinGrid::kUnconverged);
    grid.iterations.assign(cells, -1);
    if (grid.attractors.empty()) return grid;

    parallel_for(resolution, threads, [&](std::size_t row) {
        const double pi0 = grid.cell_pi(row);
        for (std::size_t col = 0; col < resolution; ++col) {
            const std::size_t idx = grid.index(row, col);
            if (!(pi0 > -1.0)) continue;  // map undefined; leave unconverged
            State s{grid.cell_e(col), pi0};
            for (std::size_t it = 0; it <= max_iter; ++it) {
                bool captured = false;
                for (std::size_t a = 0; a < grid.attractors.size(); ++a) {
                    if (std::abs(s.e - grid.attractors[a].e_bar) <= capture_radius &&
                        std::abs(s.pi - grid.attractors[a].pi_bar) <= capture_radius) {
                        grid.labels[idx] = static_cast<std::int16_t>(a);
                        grid.iterations[idx] = static_cast<std::int32_t>(it);
                        captured = true;
                        break;
                    }
                }
                if (captured || it == max_iter) break;
                s = step_map(s, params);
                if (!std::isfinite(s.e) || !std::isfinite(s.pi)) break;
            }
        }
    });
    return grid;
}

// Area fractions per attractor plus the unconverged remainder; sums to 1.
struct BasinFractions {
    std::vector<double> per_attractor;
    double unconverged;
};

inline BasinFractions basin_area_fractions(const BasinGrid& grid) {
    BasinFractions f{std::vector<double>(grid.attractors.size(), 0.0), 0.0};
    for (std::int16_t lab : grid.labels) {
        if (lab == BasinGrid::kUnconverged) f.unconverged += 1.0;
        else f.per_attractor[static_cast<std::size_t>(lab)] += 1.0;
    }
    const double n = static_cast<double>(grid.labels.size());
    for (double& x : f.per_attractor) x /= n;
    f.unconverged /= n;
    return f;
}

// 4-neighbour connected components of one label value (pass kUnconverged to
// count the unconverged set). Iterative flood fill.
inline std::size_t connected_components(const BasinGrid& grid, std::int16_t label) {
    const std::size_t n = grid.resolution;
    std::vector<std::uint8_t> seen(grid.labels.size(), 0);
    std::vector<std::size_t> stack;
    std::size_t components = 0;
    for (std::size_t start = 0; start < grid.labels.size(); ++start) {
        if (seen[start] || grid.labels[start] != label) continue;
        ++components;
        stack.push_back(start);
        seen[start] = 1;
        while (!stack.empty()) {
            const std::size_t idx = stack.back();
            stack.pop_back();
            const std::size_t row = idx / n, col = idx % n;
            const std::size_t nb[4] = {row > 0 ? idx - n : idx, row + 1 < n ? idx + n : idx,
                                       col > 0 ? idx - 1 : idx, col + 1 < n ? idx + 1 : idx};
            for (std::size_t j : nb) {
                if (j != idx && !seen[j] && grid.labels[j] == label) {
                    seen[j] = 1;
                    stack.push_back(j);
                }
            }
        }
    }
    return components;
}

}  // namespace veblen

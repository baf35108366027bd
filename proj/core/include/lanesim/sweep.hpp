#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "lanesim/config.hpp"

namespace lanesim {

// The canonical cooperation-coefficient grid.
inline const std::vector<double> kAlphaGrid = {0.0, 1.0 / 8.0, 1.0 / 4.0, 1.0 / 2.0,
                                               1.0, 2.0,       4.0,       8.0,
                                               16.0, 24.0,     32.0,      48.0};

struct SweepCell {
    int lane_count = 0;
    double t_up = 0.0;
    double alpha = 0.0;
};

struct SweepOptions {
    std::vector<int> lane_counts;
    std::vector<double> t_ups;
    std::vector<double> alphas = kAlphaGrid;
    int replicates = 3;
    int parallel = 1;  // worker threads over (cell, replicate) tasks
};

// Mean travel speed for one trained-and-evaluated condition. Seeds are
// derived as base_seed + replicate index.
using CellEvaluator = std::function<double(const SweepCell&, std::uint64_t seed)>;

struct SweepResult {
    struct CellOutcome {
        SweepCell cell;
        std::vector<double> speeds;  // per replicate
        double mean_speed = 0.0;
    };
    struct AlphaStar {
        int lane_count = 0;
        double t_up = 0.0;
        double alpha_star = 0.0;
        double best_speed = 0.0;
    };
    std::vector<CellOutcome> cells;       // grid order: lanes x t_up x alpha
    std::vector<AlphaStar> alpha_star;    // one per (lanes, t_up)
    std::array<double, 3> plane{};        // alpha* ~ b0 + b1*lanes + b2*t_up
};

// Runs every (lanes, t_up, alpha, replicate) condition (cells are
// independent; execution order does not affect the result), picks the
// speed-maximizing alpha per condition with ties broken toward the smaller
// alpha, and fits the alpha* surface with ordinary least squares.
SweepResult run_sweep(const SweepOptions& options, std::uint64_t base_seed,
                      const CellEvaluator& evaluate_cell);

// Train-then-evaluate evaluator used by the CLI: the base scenario with
// lane count, T_up and alpha substituted per cell.
CellEvaluator make_train_eval_evaluator(ScenarioConfig base, long train_steps,
                                        long eval_steps);

// Least squares fit of y ~ b0 + b1*x1 + b2*x2 via the normal equations.
// points are (x1, x2, y); needs >= 3 points in general position.
std::array<double, 3> fit_plane(const std::vector<std::array<double, 3>>& points);

}  // namespace lanesim

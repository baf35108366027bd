#include "lanesim/sweep.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "lanesim/runner.hpp"

namespace lanesim {

std::array<double, 3> fit_plane(const std::vector<std::array<double, 3>>& points) {
    if (points.size() < 3) throw std::invalid_argument("fit_plane: need at least 3 points");
    // normal equations A^T A beta = A^T y with rows (1, x1, x2)
    double m[3][3] = {};
    double rhs[3] = {};
    for (const auto& p : points) {
        const double row[3] = {1.0, p[0], p[1]};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) m[i][j] += row[i] * row[j];
            rhs[i] += row[i] * p[2];
        }
    }
    // Gaussian elimination with partial pivoting
    int order[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(m[order[r]][col]) > std::abs(m[order[pivot]][col])) pivot = r;
        }
        std::swap(order[col], order[pivot]);
        const double diag = m[order[col]][col];
        if (std::abs(diag) < 1e-12) {
            throw std::runtime_error("fit_plane: degenerate design (collinear grid)");
        }
        for (int r = col + 1; r < 3; ++r) {
            const double f = m[order[r]][col] / diag;
            for (int c2 = col; c2 < 3; ++c2) m[order[r]][c2] -= f * m[order[col]][c2];
            rhs[order[r]] -= f * rhs[order[col]];
        }
    }
    std::array<double, 3> beta{};
    for (int col = 2; col >= 0; --col) {
        double acc = rhs[order[col]];
        for (int c2 = col + 1; c2 < 3; ++c2) acc -= m[order[col]][c2] * beta[c2];
        beta[col] = acc / m[order[col]][col];
    }
    return beta;
}

SweepResult run_sweep(const SweepOptions& options, std::uint64_t base_seed,
                      const CellEvaluator& evaluate_cell) {
    if (options.lane_counts.empty() || options.t_ups.empty() || options.alphas.empty()) {
        throw std::invalid_argument("sweep: empty grid");
    }
    if (options.replicates < 1) throw std::invalid_argument("sweep: replicates must be >= 1");

    SweepResult result;
    for (int lanes : options.lane_counts) {
        for (double t_up : options.t_ups) {
            for (double alpha : options.alphas) {
                result.cells.push_back(
                    {SweepCell{lanes, t_up, alpha},
                     std::vector<double>(options.replicates, 0.0), 0.0});
            }
        }
    }

    struct Task {
        std::size_t cell;
        int replicate;
    };
    std::vector<Task> tasks;
    tasks.reserve(result.cells.size() * options.replicates);
    for (std::size_t c = 0; c < result.cells.size(); ++c) {
        for (int r = 0; r < options.replicates; ++r) tasks.push_back({c, r});
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const Task task = tasks[i];
            auto& outcome = result.cells[task.cell];
            try {
                outcome.speeds[task.replicate] = evaluate_cell(
                    outcome.cell, base_seed + static_cast<std::uint64_t>(task.replicate));
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };

    const int workers = std::max(1, std::min<int>(options.parallel,
                                                  static_cast<int>(tasks.size())));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    for (auto& outcome : result.cells) {
        double sum = 0.0;
        for (double s : outcome.speeds) sum += s;
        outcome.mean_speed = sum / static_cast<double>(outcome.speeds.size());
    }

    // argmax per (lanes, t_up); ties go to the smaller alpha, and cells are
    // laid out with alpha ascending within each condition
    const std::size_t alphas = options.alphas.size();
    std::vector<std::array<double, 3>> star_points;
    for (std::size_t base = 0; base < result.cells.size(); base += alphas) {
        std::size_t best = base;
        for (std::size_t k = base + 1; k < base + alphas; ++k) {
            if (result.cells[k].mean_speed > result.cells[best].mean_speed) best = k;
        }
        const auto& cell = result.cells[best].cell;
        result.alpha_star.push_back(
            {cell.lane_count, cell.t_up, cell.alpha, result.cells[best].mean_speed});
        star_points.push_back({static_cast<double>(cell.lane_count), cell.t_up, cell.alpha});
    }
    if (star_points.size() >= 3) {
        try {
            result.plane = fit_plane(star_points);
        } catch (const std::exception&) {
            result.plane = {0.0, 0.0, 0.0};  // degenerate grid: surface undefined
        }
    }
    return result;
}

CellEvaluator make_train_eval_evaluator(ScenarioConfig base, long train_steps,
                                        long eval_steps) {
    return [base, train_steps, eval_steps](const SweepCell& cell,
                                           std::uint64_t seed) -> double {
        ScenarioConfig cfg = base;
        cfg.road.lane_count = cell.lane_count;
        cfg.spawn.t_up = cell.t_up;
        cfg.reward.alpha = cell.alpha;
        cfg.seed = seed;
        cfg.bottleneck_enabled = false;
        cfg.total_steps = train_steps;
        TrainResult trained = train(cfg);

        cfg.total_steps = eval_steps;
        EvalResult eval = evaluate(cfg, trained.net);
        return eval.summary.mean_speed;
    };
}

}  // namespace lanesim

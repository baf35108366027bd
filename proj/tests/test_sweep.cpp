#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "lanesim/sweep.hpp"

using namespace lanesim;

TEST_CASE("fit_plane: recovers exactly planar data to machine precision") {
    const std::array<double, 3> truth = {10.0, -2.0, -1.0};
    std::vector<std::array<double, 3>> points;
    for (int lanes = 2; lanes <= 4; ++lanes) {
        for (double t = 1.0; t <= 3.0; t += 1.0) {
            points.push_back({static_cast<double>(lanes), t,
                              truth[0] + truth[1] * lanes + truth[2] * t});
        }
    }
    const auto beta = fit_plane(points);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(beta[i] - truth[i]) < 1e-9);
    for (const auto& p : points) {
        const double fitted = beta[0] + beta[1] * p[0] + beta[2] * p[1];
        CHECK(std::abs(fitted - p[2]) < 1e-9);
    }
}

TEST_CASE("fit_plane: fewer than three points is an error") {
    CHECK_THROWS_AS(fit_plane({{1, 2, 3}, {4, 5, 6}}), std::invalid_argument);
}

TEST_CASE("fit_plane: collinear designs are rejected") {
    // all points share t_up: the design matrix is rank-deficient
    std::vector<std::array<double, 3>> points = {{2, 1, 5}, {3, 1, 4}, {4, 1, 3}, {5, 1, 2}};
    CHECK_THROWS_AS(fit_plane(points), std::runtime_error);
}

TEST_CASE("sweep: the canonical alpha grid has the twelve published values") {
    REQUIRE(kAlphaGrid.size() == 12);
    CHECK(kAlphaGrid[0] == 0.0);
    CHECK(kAlphaGrid[1] == 0.125);
    CHECK(kAlphaGrid[2] == 0.25);
    CHECK(kAlphaGrid[3] == 0.5);
    CHECK(kAlphaGrid[11] == 48.0);
}

TEST_CASE("sweep: a single cell with a single alpha is its own argmax") {
    SweepOptions options;
    options.lane_counts = {2};
    options.t_ups = {3.0};
    options.alphas = {8.0};
    options.replicates = 2;
    const SweepResult result =
        run_sweep(options, 1, [](const SweepCell&, std::uint64_t) { return 17.0; });
    REQUIRE(result.alpha_star.size() == 1);
    CHECK(result.alpha_star[0].alpha_star == 8.0);
    CHECK(result.alpha_star[0].best_speed == 17.0);
}

TEST_CASE("sweep: injected speeds select the planted alpha") {
    SweepOptions options;
    options.lane_counts = {3};
    options.t_ups = {2.0};
    options.alphas = {0.0, 1.0, 8.0, 16.0};
    options.replicates = 3;
    const SweepResult result =
        run_sweep(options, 1, [](const SweepCell& cell, std::uint64_t seed) {
            const double noise = 0.001 * static_cast<double>(seed % 3);
            return (cell.alpha == 8.0 ? 25.0 : 20.0) + noise;
        });
    REQUIRE(result.alpha_star.size() == 1);
    CHECK(result.alpha_star[0].alpha_star == 8.0);
}

TEST_CASE("sweep: exact ties resolve to the smaller alpha") {
    SweepOptions options;
    options.lane_counts = {2};
    options.t_ups = {4.0};
    options.alphas = {0.0, 2.0, 8.0};
    options.replicates = 1;
    const SweepResult result =
        run_sweep(options, 1, [](const SweepCell&, std::uint64_t) { return 9.0; });
    CHECK(result.alpha_star[0].alpha_star == 0.0);
}

TEST_CASE("sweep: results are independent of worker count") {
    SweepOptions options;
    options.lane_counts = {2, 3, 4};
    options.t_ups = {1.0, 2.0, 3.0};
    options.alphas = {0.0, 1.0, 2.0, 4.0};
    options.replicates = 2;
    auto evaluator = [](const SweepCell& cell, std::uint64_t seed) {
        // deterministic pure function of the condition
        return std::sin(cell.alpha + cell.t_up) + 0.1 * cell.lane_count +
               0.01 * static_cast<double>(seed);
    };
    options.parallel = 1;
    const SweepResult serial = run_sweep(options, 7, evaluator);
    options.parallel = 8;
    const SweepResult parallel = run_sweep(options, 7, evaluator);
    REQUIRE(serial.cells.size() == parallel.cells.size());
    for (std::size_t i = 0; i < serial.cells.size(); ++i) {
        CHECK(serial.cells[i].mean_speed == parallel.cells[i].mean_speed);
        CHECK(serial.cells[i].speeds == parallel.cells[i].speeds);
    }
    CHECK(serial.plane == parallel.plane);
}

TEST_CASE("sweep: replicate seeds are base + index") {
    SweepOptions options;
    options.lane_counts = {2};
    options.t_ups = {1.0};
    options.alphas = {0.0};
    options.replicates = 3;
    std::vector<std::uint64_t> seen;
    std::mutex mutex;
    run_sweep(options, 100, [&](const SweepCell&, std::uint64_t seed) {
        std::lock_guard<std::mutex> lock(mutex);
        seen.push_back(seed);
        return 0.0;
    });
    std::sort(seen.begin(), seen.end());
    CHECK(seen == std::vector<std::uint64_t>{100, 101, 102});
}

TEST_CASE("sweep: empty grids are rejected") {
    SweepOptions options;
    options.lane_counts = {};
    options.t_ups = {1.0};
    CHECK_THROWS_AS(run_sweep(options, 1, [](const SweepCell&, std::uint64_t) { return 0.0; }),
                    std::invalid_argument);
    options.lane_counts = {2};
    options.alphas = {};
    CHECK_THROWS_AS(run_sweep(options, 1, [](const SweepCell&, std::uint64_t) { return 0.0; }),
                    std::invalid_argument);
}

TEST_CASE("sweep: planar synthetic alpha stars are recovered through the whole pipeline") {
    // alpha* = 10 - 2*lanes - t_up lands exactly on grid members
    SweepOptions options;
    options.lane_counts = {2, 3};
    options.t_ups = {1.0, 2.0, 3.0};
    options.alphas = {1.0, 2.0, 3.0, 4.0, 5.0};
    options.replicates = 1;
    auto planted = [](const SweepCell& cell) {
        return 10.0 - 2.0 * cell.lane_count - cell.t_up;
    };
    const SweepResult result =
        run_sweep(options, 1, [&](const SweepCell& cell, std::uint64_t) {
            return -std::abs(cell.alpha - planted(cell));
        });
    for (const auto& star : result.alpha_star) {
        CHECK(star.alpha_star ==
              doctest::Approx(10.0 - 2.0 * star.lane_count - star.t_up));
    }
    CHECK(result.plane[0] == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(result.plane[1] == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(result.plane[2] == doctest::Approx(-1.0).epsilon(1e-9));
}

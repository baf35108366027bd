#pragma once

#include <span>
#include <vector>

#include "lanesim/world.hpp"

namespace lanesim {

struct Crossing {
    long step = 0;
    int vehicle_id = 0;
    double speed = 0.0;  // m/s at the crossing
};

// Fixed road cross-section counting vehicles that pass it. Crossings are
// appended in step order; a vehicle can cross a given loop at most once
// because positions never decrease.
struct LoopDetector {
    double x_loop = 0.0;
    std::vector<Crossing> crossings;

    // Crossings with step in (step_lo, step_hi].
    long count_between(long step_lo, long step_hi) const;
};

class LoopDetectors {
public:
    LoopDetectors() = default;
    explicit LoopDetectors(std::vector<double> positions);

    // Loops at spacing, 2*spacing, ... strictly inside the road.
    static LoopDetectors spaced(double spacing, double road_length);

    // Registers every trace with x_before < x_loop <= x_after.
    void record(long step, std::span<const VehicleTrace> traces);

    const std::vector<LoopDetector>& loops() const { return loops_; }
    bool empty() const { return loops_.empty(); }

    // Index of the nearest loop with x_loop >= x, or -1.
    int nearest_downstream(double x) const;
    // Index of the loop with the largest x_loop, or -1.
    int most_downstream() const;

private:
    std::vector<LoopDetector> loops_;  // ascending x_loop
};

struct FlowDensityRecord {
    int loop_index = 0;
    double loop_x = 0.0;
    long window_start_step = 0;
    double flow_veh_per_h = 0.0;
    double density_veh_per_km = 0.0;
    double space_mean_speed = 0.0;  // harmonic mean, m/s; 0 for empty windows
};

// Point-detector estimate over steps [window_start, window_start + window_steps):
// q = count/window, v = harmonic mean of crossing speeds, k = q / (3.6 v).
FlowDensityRecord aggregate(const LoopDetector& loop, int loop_index,
                            long window_start_step, long window_steps, double dt);

// Tiles [0, total_steps) into consecutive windows for every loop.
std::vector<FlowDensityRecord> aggregate_series(const LoopDetectors& detectors,
                                                long total_steps,
                                                double window_seconds, double dt);

// Arithmetic mean of v over vehicle-steps; rejects an empty log.
struct SpeedAccumulator {
    double sum = 0.0;
    double expected_sum = 0.0;
    long samples = 0;

    void add(double v, double v_exp) {
        sum += v;
        expected_sum += v_exp;
        ++samples;
    }
    double mean() const;
    double mean_expected() const;
};

}  // namespace lanesim

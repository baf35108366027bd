#pragma once

#include "lanesim/metrics.hpp"

namespace lanesim {

struct RewardParams {
    double alpha = 0.0;  // lane-change cooperation coefficient
    double v_min = 40.0 / 3.6;
    double v_max = 110.0 / 3.6;
    double q_window = 60.0;  // s of crossings feeding the flow term
    double q_ref = 0.5;      // veh/s/lane normalizer for the flow term
};

// Speed-deficit term, clamped into [-1, 0].
double speed_reward(double dv, const RewardParams& p);

// Normalized flow past the loop nearest downstream of ego_x over the last
// q_window seconds; 0 when no loop is downstream or the window is empty.
double measure_q(const LoopDetectors& detectors, double ego_x, long step,
                 double dt, int lane_count, const RewardParams& p);

// speed term + lane-change penalty (charged once, at maneuver start) + flow term
double compute_reward(double dv, bool changed_lane, double q, const RewardParams& p);

}  // namespace lanesim

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>

namespace lanesim {

// Driving decisions, in fixed index order.
enum class Action : int { left = 0, right = 1, speedup = 2, none = 3 };

inline constexpr int kActionCount = 4;

inline const char* to_string(Action a) {
    switch (a) {
        case Action::left: return "left";
        case Action::right: return "right";
        case Action::speedup: return "speedup";
        case Action::none: return "none";
    }
    return "?";
}

struct LaneChangeState {
    int target_lane = 0;
    int steps_remaining = 0;
};

// Kinematic state of one car. x is the front-bumper position; the body
// spans [x - car_length, x].
struct Vehicle {
    int id = 0;
    double x = 0.0;    // longitudinal position, m
    double y = 0.0;    // lateral position, m
    int lane = 0;      // 0 = leftmost
    double v = 0.0;    // longitudinal speed, m/s
    double v_y = 0.0;  // lateral speed, m/s
    double v_exp = 0.0;  // expected (desired) speed, m/s
    std::optional<LaneChangeState> lane_change;
    std::optional<long> stuck_until;  // next bottleneck redraw step while held
    bool entered_bottleneck = false;
    long spawn_step = 0;
    double speed_sum = 0.0;  // lifetime accumulator for the exit log
    long speed_samples = 0;

    bool changing() const { return lane_change.has_value(); }
    bool held() const { return stuck_until.has_value(); }

    // A changing vehicle occupies both its source and target lane for the
    // whole maneuver.
    bool occupies(int lane_index) const {
        return lane_index == lane ||
               (lane_change && lane_change->target_lane == lane_index);
    }
};

struct RoadConfig {
    int lane_count = 3;
    double road_length = 2000.0;  // m
    double lane_width = 3.5;      // m
    double dt = 0.1;              // s per step
    double car_length = 4.0;      // m

    double lane_center(int lane) const { return (lane + 0.5) * lane_width; }
};

struct CarFollowingParams {
    double c = 1.5;     // 1/s
    double d = -0.5;    // dimensionless
    double v_acc = 0.4; // m/s speed increment per speedup decision
};

struct SafetyParams {
    double a1 = 2.0;   // dimensionless
    double a2 = 0.5;   // s
    double v_cc = 1.0; // m/s
};

struct LaneChangeParams {
    double t_change = 4.0;  // s for one maneuver
    bool lockout = true;    // refuse new maneuvers while one is active
};

struct SpawnConfig {
    bool enabled = true;
    double t_up = 2.0;    // s between departures per lane
    double jitter = 0.2;  // fraction of t_up, uniform +/-
    double v_exp_min = 40.0 / 3.6;   // 40 km/h
    double v_exp_max = 110.0 / 3.6;  // 110 km/h
    double v_init_factor = 1.0;      // initial speed as a fraction of v_exp
};

struct BottleneckSchedule {
    double x_bottle = 1300.0;  // m
    double zone_radius = 50.0; // m
    long start_step = 0;
    long end_step = 50000;
    double rehold_interval = 10.0;  // s between stuck redraws

    // Stuck ratio, linear decay 1 -> 0 over [start_step, end_step].
    double stuck_ratio(long step) const {
        if (step <= start_step) return 1.0;
        if (step >= end_step) return 0.0;
        const double span = static_cast<double>(end_step - start_step);
        const double p = 1.0 - static_cast<double>(step - start_step) / span;
        return std::clamp(p, 0.0, 1.0);
    }
};

struct ExitRecord {
    int vehicle_id = 0;
    long spawn_step = 0;
    long exit_step = 0;
    double mean_speed = 0.0;
};

}  // namespace lanesim

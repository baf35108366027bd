#pragma once

#include <functional>
#include <vector>

#include "lanesim/config.hpp"
#include "lanesim/dqn.hpp"
#include "lanesim/metrics.hpp"

namespace lanesim {

struct TrainLogRow {
    long step = 0;
    double loss = 0.0;         // 0 before the warmup threshold
    double mean_reward = 0.0;  // over experiences generated this step
    double mean_speed = 0.0;   // over live vehicles after the step
};

struct TrainResult {
    QNetwork net;
    std::vector<TrainLogRow> log;
    long updates = 0;
};

// Runs the simulator with one shared policy controlling every vehicle and
// trains it online: per step each vehicle outside a maneuver acts, its
// transition is pushed to the replay buffer, and one SGD update on a
// sampled batch follows once the buffer holds `warmup` experiences.
TrainResult train(const ScenarioConfig& cfg);

struct TrajectoryRow {
    long step = 0;
    int vehicle_id = 0;
    int lane = 0;
    double x = 0.0;
    double y = 0.0;
    double v = 0.0;
    double v_y = 0.0;
    bool changing = false;
};
using TrajectorySink = std::function<void(const TrajectoryRow&)>;

struct EvalSummary {
    double mean_speed = 0.0;
    double mean_expected_speed = 0.0;
    double throughput_veh_per_h = 0.0;  // most-downstream loop over the horizon
    long lane_changes = 0;
    double lane_changes_per_vehicle_km = 0.0;
    long total_spawned = 0;
    long total_exited = 0;
    // Per-lane mean speed over the final tenth of the horizon (recovery check).
    std::vector<double> tail_lane_mean_speed;
};

struct EvalResult {
    EvalSummary summary;
    std::vector<FlowDensityRecord> flow_density;
    std::vector<ExitRecord> exits;
};

// Greedy rollout of a trained policy (exploit probability forced to 1),
// no learning. The sink, when set, receives one row per vehicle every
// cfg.log_interval steps.
EvalResult evaluate(const ScenarioConfig& cfg, const QNetwork& net,
                    const TrajectorySink& trajectory = {});

}  // namespace lanesim

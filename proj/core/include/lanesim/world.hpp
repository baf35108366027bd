#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "lanesim/rng.hpp"
#include "lanesim/types.hpp"

namespace lanesim {

struct WorldConfig {
    RoadConfig road;
    CarFollowingParams car_following;
    SafetyParams safety;
    LaneChangeParams lane_change;
    SpawnConfig spawn;
    std::optional<BottleneckSchedule> bottleneck;
};

// One vehicle's longitudinal motion during a step, for detectors and logs.
struct VehicleTrace {
    int id = 0;
    int lane = 0;
    double x_before = 0.0;
    double x_after = 0.0;
    double v_after = 0.0;
};

struct StepReport {
    std::vector<VehicleTrace> traces;       // id order, all vehicles that moved
    std::vector<int> spawned;               // ids created this step
    std::vector<int> lane_changes_started;  // ids whose left/right was accepted
    std::vector<ExitRecord> exits;
};

// Car-following speed limit: min of the incremented current speed and the
// gap envelope v_exp * (1 - exp(-c*gap/v_exp - d)), clamped to [0, v_exp].
// gap is bumper-to-bumper; pass infinity when there is no leader.
double newell_speed(double v, double v_exp, double gap, bool speedup,
                    const CarFollowingParams& p);

// Multi-lane highway with per-lane jittered inflow, car-following,
// constant-lateral-speed lane changes, a hard collision-check speed cap and
// an optional stuck-vehicle bottleneck. One actor mutates a world; whole
// worlds are freely movable between threads.
class World {
public:
    World(WorldConfig config, std::uint64_t seed);

    // Advances the world one step. Executes, in order: spawning, lane-change
    // starts, car-following speeds, bottleneck holds, collision-check caps,
    // position integration and exit removal. Throws std::invalid_argument if
    // the map names an unknown vehicle id; vehicles without an entry act as
    // Action::none.
    StepReport step(const std::unordered_map<int, Action>& actions);

    // Per-lane departure clocks; returns ids of vehicles created.
    std::vector<int> spawn_vehicles();

    // Starts a maneuver. Returns false (state unchanged) when the target
    // lane does not exist, a maneuver is already active, or a vehicle in
    // the target lane overlaps the requester's body.
    bool begin_lane_change(int id, Action direction);

    // Draws/holds stuck vehicles around the bottleneck and zeroes their
    // candidate speeds. candidates is indexed like vehicles().
    void apply_bottleneck(std::vector<double>& candidates, long step);

    // Caps candidate speeds behind close leaders; a changing vehicle is
    // checked against both its lanes and the tighter cap wins.
    void collision_check(std::vector<double>& candidates) const;

    // Bumper-to-bumper gap to the nearest leader occupying `lane`;
    // infinity when there is none.
    double gap_in_lane(const Vehicle& vehicle, int lane) const;
    // Minimum gap over all lanes the vehicle occupies.
    double leader_gap(const Vehicle& vehicle) const;
    const Vehicle* find_leader(const Vehicle& vehicle, int lane) const;

    const std::vector<Vehicle>& vehicles() const { return vehicles_; }
    const Vehicle* find(int id) const;
    long step_index() const { return step_; }
    const WorldConfig& config() const { return config_; }
    long total_spawned() const { return total_spawned_; }
    long total_exited() const { return total_exited_; }

    // Places a vehicle directly (tests and probe scenarios). No occupancy
    // checks are made.
    int add_vehicle(int lane, double x, double v, double v_exp);

private:
    double entry_block_threshold(double v_spawn) const;
    bool entry_region_free(int lane, double v_spawn) const;
    bool begin_lane_change(Vehicle& vehicle, Action direction);
    Vehicle* find_mut(int id);

    WorldConfig config_;
    Rng rng_;
    long step_ = 0;
    std::vector<Vehicle> vehicles_;  // ascending id
    int next_id_ = 0;
    long total_spawned_ = 0;
    long total_exited_ = 0;

    struct LaneClock {
        double next_fire_time = 0.0;
        std::optional<double> pending_v_exp;  // drawn when the clock fires
    };
    std::vector<LaneClock> clocks_;
};

}  // namespace lanesim

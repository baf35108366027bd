#pragma once

#include <cstdint>
#include <string>

#include "lanesim/dqn.hpp"
#include "lanesim/reward.hpp"
#include "lanesim/world.hpp"

namespace lanesim {

struct MetricsConfig {
    double loop_spacing = 200.0;    // m between virtual loops; <= 0 disables them
    double window = 30.0;           // s per flow-density aggregation window
};

// Everything one run needs. File format: `section.key = value` lines,
// '#' comments; command-line flags override file values.
struct ScenarioConfig {
    RoadConfig road;
    SpawnConfig spawn;
    CarFollowingParams car_following;
    SafetyParams safety;
    LaneChangeParams lane_change;
    RewardParams reward;
    DqnConfig dqn;
    MetricsConfig metrics;
    bool bottleneck_enabled = false;
    BottleneckSchedule bottleneck;
    long total_steps = 90000;
    std::uint64_t seed = 1;
    long log_interval = 1;  // trajectory rows every n steps

    static ScenarioConfig from_file(const std::string& path);

    // Applies one `key = value` assignment; throws std::runtime_error
    // naming the key on unknown keys or unparsable values.
    void set(const std::string& key, const std::string& value);

    // Throws std::runtime_error naming the offending field.
    void validate() const;

    // Flat key=value listing, one per line, suitable for re-parsing and for
    // embedding into emitted artifacts.
    std::string serialize() const;

    WorldConfig world_config() const {
        WorldConfig wc{road, car_following, safety, lane_change, spawn, std::nullopt};
        if (bottleneck_enabled) wc.bottleneck = bottleneck;
        return wc;
    }
};

}  // namespace lanesim

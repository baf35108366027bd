#pragma once

#include <array>
#include <cstdint>

#include "lanesim/world.hpp"

namespace lanesim {

// Binary occupancy grid around an ego vehicle: rows are {left lane, ego
// lane, right lane}, columns are 1 m cells covering [ref - 5, ref + 15)
// where ref is the ego's front bumper. Rows for lanes that do not exist
// are filled with ones so the road edge is visible.
struct TrafficSnapshot {
    static constexpr int kRows = 3;
    static constexpr int kCols = 20;
    static constexpr double kBehind = 5.0;  // m covered behind ref
    static constexpr double kAhead = 15.0;  // m covered ahead of ref

    std::array<std::uint8_t, kRows * kCols> cells{};

    std::uint8_t& at(int row, int col) { return cells[row * kCols + col]; }
    std::uint8_t at(int row, int col) const { return cells[row * kCols + col]; }

    bool operator==(const TrafficSnapshot&) const = default;
};

TrafficSnapshot extract_snapshot(const World& world, const Vehicle& ego);

// Network input: the last three snapshots and speed deficits, oldest first.
struct AgentState {
    std::array<TrafficSnapshot, 3> frames;  // [t-2, t-1, t]
    std::array<double, 3> dv{};             // v - v_exp, m/s, <= 0

    bool operator==(const AgentState&) const = default;
};

// Per-vehicle ring of recent frames. Until three frames exist, the oldest
// available frame is replicated backwards in time.
class StateHistory {
public:
    void push(const TrafficSnapshot& snapshot, double dv) {
        slots_[next_] = {snapshot, dv};
        next_ = (next_ + 1) % 3;
        if (count_ < 3) ++count_;
    }

    int size() const { return count_; }

    AgentState state() const;

private:
    struct Frame {
        TrafficSnapshot snapshot;
        double dv = 0.0;
    };
    std::array<Frame, 3> slots_{};
    int next_ = 0;
    int count_ = 0;
};

}  // namespace lanesim

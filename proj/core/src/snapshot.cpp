#include "lanesim/snapshot.hpp"

#include <cassert>
#include <cmath>

namespace lanesim {

static_assert(TrafficSnapshot::kBehind + TrafficSnapshot::kAhead ==
              static_cast<double>(TrafficSnapshot::kCols));

TrafficSnapshot extract_snapshot(const World& world, const Vehicle& ego) {
    TrafficSnapshot snap;
    const int lane_count = world.config().road.lane_count;
    const double car_length = world.config().road.car_length;

    for (int row = 0; row < TrafficSnapshot::kRows; ++row) {
        const int lane = ego.lane + (row - 1);
        if (lane < 0 || lane >= lane_count) {
            for (int col = 0; col < TrafficSnapshot::kCols; ++col) snap.at(row, col) = 1;
        }
    }

    for (const auto& veh : world.vehicles()) {
        // Body treated as [x - L, x): a vehicle whose rear bumper sits
        // exactly on a cell boundary does not reach into the cell behind it.
        const double rel = veh.x - ego.x;
        const long lo = static_cast<long>(
                            std::floor(rel + TrafficSnapshot::kBehind - 1.0 - car_length)) + 1;
        const long hi = static_cast<long>(
                            std::ceil(rel + TrafficSnapshot::kBehind)) - 1;
        const long col_lo = std::max(lo, 0L);
        const long col_hi = std::min(hi, static_cast<long>(TrafficSnapshot::kCols) - 1);
        if (col_lo > col_hi) continue;
        for (int row = 0; row < TrafficSnapshot::kRows; ++row) {
            const int lane = ego.lane + (row - 1);
            if (lane < 0 || lane >= lane_count) continue;
            if (!veh.occupies(lane)) continue;
            for (long col = col_lo; col <= col_hi; ++col) {
                snap.at(row, static_cast<int>(col)) = 1;
            }
        }
    }
    return snap;
}

AgentState StateHistory::state() const {
    assert(count_ > 0);
    AgentState state;
    // slots_ is a ring; oldest retained frame sits at next_ once full.
    for (int k = 0; k < 3; ++k) {
        int age = 2 - k;  // 0 = newest
        if (age >= count_) age = count_ - 1;
        const int idx = ((next_ - 1 - age) % 3 + 3) % 3;
        state.frames[k] = slots_[idx].snapshot;
        state.dv[k] = slots_[idx].dv;
    }
    return state;
}

}  // namespace lanesim

#include "lanesim/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace lanesim {

long LoopDetector::count_between(long step_lo, long step_hi) const {
    auto lo = std::upper_bound(crossings.begin(), crossings.end(), step_lo,
                               [](long s, const Crossing& c) { return s < c.step; });
    auto hi = std::upper_bound(crossings.begin(), crossings.end(), step_hi,
                               [](long s, const Crossing& c) { return s < c.step; });
    return static_cast<long>(hi - lo);
}

LoopDetectors::LoopDetectors(std::vector<double> positions) {
    std::sort(positions.begin(), positions.end());
    loops_.reserve(positions.size());
    for (double x : positions) loops_.push_back({x, {}});
}

LoopDetectors LoopDetectors::spaced(double spacing, double road_length) {
    std::vector<double> positions;
    if (spacing > 0.0) {
        for (double x = spacing; x < road_length; x += spacing) positions.push_back(x);
    }
    return LoopDetectors(std::move(positions));
}

void LoopDetectors::record(long step, std::span<const VehicleTrace> traces) {
    for (auto& loop : loops_) {
        for (const auto& trace : traces) {
            if (trace.x_before < loop.x_loop && loop.x_loop <= trace.x_after) {
                loop.crossings.push_back({step, trace.id, trace.v_after});
            }
        }
    }
}

int LoopDetectors::nearest_downstream(double x) const {
    for (std::size_t i = 0; i < loops_.size(); ++i) {
        if (loops_[i].x_loop >= x) return static_cast<int>(i);
    }
    return -1;
}

int LoopDetectors::most_downstream() const {
    return loops_.empty() ? -1 : static_cast<int>(loops_.size()) - 1;
}

FlowDensityRecord aggregate(const LoopDetector& loop, int loop_index,
                            long window_start_step, long window_steps, double dt) {
    FlowDensityRecord rec;
    rec.loop_index = loop_index;
    rec.loop_x = loop.x_loop;
    rec.window_start_step = window_start_step;

    long count = 0;
    double inv_speed_sum = 0.0;
    for (const auto& crossing : loop.crossings) {
        if (crossing.step < window_start_step ||
            crossing.step >= window_start_step + window_steps) {
            continue;
        }
        ++count;
        inv_speed_sum += 1.0 / crossing.speed;
    }
    if (count == 0) return rec;  // q = k = v = 0

    const double window_seconds = static_cast<double>(window_steps) * dt;
    rec.flow_veh_per_h = static_cast<double>(count) * 3600.0 / window_seconds;
    rec.space_mean_speed = static_cast<double>(count) / inv_speed_sum;
    rec.density_veh_per_km = rec.flow_veh_per_h / (rec.space_mean_speed * 3.6);
    return rec;
}

std::vector<FlowDensityRecord> aggregate_series(const LoopDetectors& detectors,
                                                long total_steps,
                                                double window_seconds, double dt) {
    std::vector<FlowDensityRecord> records;
    const long window_steps = std::max<long>(1, std::lround(window_seconds / dt));
    for (long start = 0; start < total_steps; start += window_steps) {
        for (std::size_t i = 0; i < detectors.loops().size(); ++i) {
            records.push_back(aggregate(detectors.loops()[i], static_cast<int>(i),
                                        start, window_steps, dt));
        }
    }
    return records;
}

double SpeedAccumulator::mean() const {
    if (samples == 0) throw std::runtime_error("mean_travel_speed: empty log");
    return sum / static_cast<double>(samples);
}

double SpeedAccumulator::mean_expected() const {
    if (samples == 0) throw std::runtime_error("mean_travel_speed: empty log");
    return expected_sum / static_cast<double>(samples);
}

}  // namespace lanesim

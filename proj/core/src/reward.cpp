#include "lanesim/reward.hpp"

#include <algorithm>
#include <cmath>

namespace lanesim {

double speed_reward(double dv, const RewardParams& p) {
    const double range = p.v_max - p.v_min;
    return std::clamp(dv, -range, 0.0) / range;
}

double measure_q(const LoopDetectors& detectors, double ego_x, long step,
                 double dt, int lane_count, const RewardParams& p) {
    const int loop = detectors.nearest_downstream(ego_x);
    if (loop < 0) return 0.0;
    const long window_steps = std::max<long>(1, std::lround(p.q_window / dt));
    const long count =
        detectors.loops()[loop].count_between(step - window_steps, step);
    return static_cast<double>(count) /
           (p.q_window * static_cast<double>(lane_count) * p.q_ref);
}

double compute_reward(double dv, bool changed_lane, double q, const RewardParams& p) {
    return speed_reward(dv, p) + (changed_lane ? -p.alpha : 0.0) + q;
}

}  // namespace lanesim

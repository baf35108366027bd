#pragma once

// Shared test scaffolding: an independent occupancy-grid oracle, overlap
// scanning for the safety invariant, random state generators and a
// finite-difference gradient comparison. Everything here deliberately
// avoids the implementation's own shortcuts.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lanesim/dqn.hpp"
#include "lanesim/snapshot.hpp"
#include "lanesim/world.hpp"

namespace lanesim::testing {

// Per-cell interval-intersection oracle for extract_snapshot. Bodies are
// [x - L, x) against half-open 1 m cells; missing lanes render as ones.
inline TrafficSnapshot snapshot_oracle(const World& world, const Vehicle& ego) {
    TrafficSnapshot snap;
    const auto& road = world.config().road;
    for (int row = 0; row < TrafficSnapshot::kRows; ++row) {
        const int lane = ego.lane + (row - 1);
        const bool exists = lane >= 0 && lane < road.lane_count;
        for (int col = 0; col < TrafficSnapshot::kCols; ++col) {
            if (!exists) {
                snap.at(row, col) = 1;
                continue;
            }
            const double cell_lo = -TrafficSnapshot::kBehind + col;
            const double cell_hi = cell_lo + 1.0;
            for (const auto& veh : world.vehicles()) {
                if (!veh.occupies(lane)) continue;
                const double body_hi = veh.x - ego.x;
                const double body_lo = body_hi - road.car_length;
                if (body_hi > cell_lo && body_lo < cell_hi) {
                    snap.at(row, col) = 1;
                    break;
                }
            }
        }
    }
    return snap;
}

// True when two vehicles sharing any occupied lane have bodies overlapping
// by more than eps.
inline bool any_same_lane_overlap(const World& world, double eps = 1e-9) {
    const double len = world.config().road.car_length;
    const int lanes = world.config().road.lane_count;
    std::vector<double> fronts;
    for (int lane = 0; lane < lanes; ++lane) {
        fronts.clear();
        for (const auto& veh : world.vehicles()) {
            if (veh.occupies(lane)) fronts.push_back(veh.x);
        }
        std::sort(fronts.begin(), fronts.end());
        for (std::size_t i = 1; i < fronts.size(); ++i) {
            if (fronts[i] - len < fronts[i - 1] - eps) return true;
        }
    }
    return false;
}

inline TrafficSnapshot random_snapshot(Rng& rng, double fill = 0.15) {
    TrafficSnapshot snap;
    for (auto& cell : snap.cells) cell = rng.bernoulli(fill) ? 1 : 0;
    return snap;
}

inline AgentState random_state(Rng& rng) {
    AgentState s;
    for (auto& frame : s.frames) frame = random_snapshot(rng);
    for (auto& dv : s.dv) dv = -rng.uniform(0.0, 19.0);
    return s;
}

inline Experience random_experience(Rng& rng) {
    Experience e;
    e.s = random_state(rng);
    e.s_next = random_state(rng);
    e.a = static_cast<Action>(rng.uniform_int(kActionCount));
    e.r = rng.uniform(-2.0, 2.0);
    return e;
}

// Relative error between analytic td_loss gradients and central finite
// differences, per tensor, over `probes` sampled coordinates. Returns the
// worst tensor's error.
inline double gradient_check_worst(const QNetwork& online, const QNetwork& target,
                                   std::span<const Experience* const> batch,
                                   double gamma, double h, int probes, Rng& rng) {
    QNetwork grads = QNetwork::zeros();
    BatchWorkspace ws_a, ws_b;
    td_loss(online, target, batch, gamma, grads, ws_a, ws_b);

    QNetwork probe_net = online;
    QNetwork scratch = QNetwork::zeros();
    auto probe_tensors = probe_net.tensors();
    auto grad_tensors = grads.tensors();

    double worst = 0.0;
    for (std::size_t t = 0; t < probe_tensors.size(); ++t) {
        std::vector<double>& params = *probe_tensors[t].data;
        const std::vector<double>& analytic = *grad_tensors[t].data;
        double num2 = 0.0, an2 = 0.0, diff2 = 0.0;
        for (int k = 0; k < probes; ++k) {
            const std::size_t i = rng.uniform_int(params.size());
            const double saved = params[i];
            params[i] = saved + h;
            const double up = td_loss(probe_net, target, batch, gamma, scratch, ws_a, ws_b);
            params[i] = saved - h;
            const double down = td_loss(probe_net, target, batch, gamma, scratch, ws_a, ws_b);
            params[i] = saved;
            const double fd = (up - down) / (2.0 * h);
            num2 += fd * fd;
            an2 += analytic[i] * analytic[i];
            diff2 += (fd - analytic[i]) * (fd - analytic[i]);
        }
        const double denom = std::max({std::sqrt(num2), std::sqrt(an2), 1e-12});
        worst = std::max(worst, std::sqrt(diff2) / denom);
    }
    return worst;
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace lanesim::testing

#include "lanesim/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace lanesim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double newell_speed(double v, double v_exp, double gap, bool speedup,
                    const CarFollowingParams& p) {
    const double increment = speedup ? p.v_acc : 0.0;
    double envelope = v_exp;
    if (std::isfinite(gap)) {
        envelope = v_exp * (1.0 - std::exp(-p.c * gap / v_exp - p.d));
    }
    const double next = std::min(v + increment, envelope);
    return std::clamp(next, 0.0, v_exp);
}

World::World(WorldConfig config, std::uint64_t seed)
    : config_(std::move(config)), rng_(derive_seed(seed, 0x11)) {
    clocks_.resize(config_.road.lane_count);
    const auto& sp = config_.spawn;
    for (auto& clock : clocks_) {
        clock.next_fire_time = sp.t_up * (1.0 + sp.jitter * rng_.uniform(-1.0, 1.0));
    }
}

const Vehicle* World::find(int id) const {
    auto it = std::lower_bound(vehicles_.begin(), vehicles_.end(), id,
                               [](const Vehicle& v, int key) { return v.id < key; });
    if (it == vehicles_.end() || it->id != id) return nullptr;
    return &*it;
}

Vehicle* World::find_mut(int id) {
    return const_cast<Vehicle*>(std::as_const(*this).find(id));
}

bool World::begin_lane_change(int id, Action direction) {
    Vehicle* vehicle = find_mut(id);
    if (!vehicle) throw std::invalid_argument("unknown vehicle id " + std::to_string(id));
    return begin_lane_change(*vehicle, direction);
}

int World::add_vehicle(int lane, double x, double v, double v_exp) {
    Vehicle veh;
    veh.id = next_id_++;
    veh.lane = lane;
    veh.x = x;
    veh.y = config_.road.lane_center(lane);
    veh.v = v;
    veh.v_exp = v_exp;
    veh.spawn_step = step_;
    vehicles_.push_back(veh);
    ++total_spawned_;
    return veh.id;
}

double World::entry_block_threshold(double v_spawn) const {
    return config_.safety.a1 * config_.road.car_length + config_.safety.a2 * v_spawn;
}

bool World::entry_region_free(int lane, double v_spawn) const {
    const double threshold = entry_block_threshold(v_spawn);
    for (const auto& veh : vehicles_) {
        if (!veh.occupies(lane)) continue;
        // body [x - L, x] intersects [0, threshold)
        if (veh.x >= 0.0 && veh.x - config_.road.car_length < threshold) return false;
    }
    return true;
}

std::vector<int> World::spawn_vehicles() {
    std::vector<int> spawned;
    if (!config_.spawn.enabled) return spawned;
    const auto& sp = config_.spawn;
    const double now = static_cast<double>(step_) * config_.road.dt;
    for (int lane = 0; lane < config_.road.lane_count; ++lane) {
        auto& clock = clocks_[lane];
        if (!clock.pending_v_exp && now >= clock.next_fire_time) {
            clock.pending_v_exp = rng_.uniform(sp.v_exp_min, sp.v_exp_max);
        }
        if (!clock.pending_v_exp) continue;
        const double v_exp = *clock.pending_v_exp;
        if (!entry_region_free(lane, v_exp)) continue;  // blocked spawns defer

        const int id = add_vehicle(lane, 0.0, v_exp * sp.v_init_factor, v_exp);
        spawned.push_back(id);
        clock.pending_v_exp.reset();
        clock.next_fire_time = now + sp.t_up * (1.0 + sp.jitter * rng_.uniform(-1.0, 1.0));
    }
    return spawned;
}

bool World::begin_lane_change(Vehicle& vehicle, Action direction) {
    if (direction != Action::left && direction != Action::right) return false;
    if (vehicle.changing() && config_.lane_change.lockout) return false;
    const int delta = direction == Action::left ? -1 : 1;
    const int target = vehicle.lane + delta;
    if (target < 0 || target >= config_.road.lane_count) return false;

    // A merge straight into a body already alongside would violate the
    // no-overlap invariant instantly; speed caps cannot undo it.
    const double len = config_.road.car_length;
    for (const auto& other : vehicles_) {
        if (other.id == vehicle.id || !other.occupies(target)) continue;
        if (other.x > vehicle.x - len && other.x - len < vehicle.x) return false;
    }

    const double t_change = config_.lane_change.t_change;
    vehicle.lane_change = LaneChangeState{
        target, static_cast<int>(std::lround(t_change / config_.road.dt))};
    vehicle.v_y = static_cast<double>(delta) * config_.road.lane_width / t_change;
    return true;
}

const Vehicle* World::find_leader(const Vehicle& vehicle, int lane) const {
    const Vehicle* leader = nullptr;
    for (const auto& other : vehicles_) {
        if (other.id == vehicle.id || !other.occupies(lane)) continue;
        if (other.x < vehicle.x) continue;
        if (!leader || other.x < leader->x ||
            (other.x == leader->x && other.id < leader->id)) {
            leader = &other;
        }
    }
    return leader;
}

double World::gap_in_lane(const Vehicle& vehicle, int lane) const {
    const Vehicle* leader = find_leader(vehicle, lane);
    if (!leader) return kInf;
    return leader->x - config_.road.car_length - vehicle.x;
}

double World::leader_gap(const Vehicle& vehicle) const {
    double gap = gap_in_lane(vehicle, vehicle.lane);
    if (vehicle.changing()) {
        gap = std::min(gap, gap_in_lane(vehicle, vehicle.lane_change->target_lane));
    }
    return gap;
}

void World::apply_bottleneck(std::vector<double>& candidates, long step) {
    if (!config_.bottleneck) return;
    const auto& sched = *config_.bottleneck;
    const bool active = step >= sched.start_step && step <= sched.end_step;
    if (!active) {
        for (auto& veh : vehicles_) veh.stuck_until.reset();
        return;
    }
    const double p = sched.stuck_ratio(step);
    const long rehold_steps =
        std::max<long>(1, std::lround(sched.rehold_interval / config_.road.dt));
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
        auto& veh = vehicles_[i];
        if (!veh.entered_bottleneck &&
            std::abs(veh.x - sched.x_bottle) <= sched.zone_radius) {
            veh.entered_bottleneck = true;
            if (rng_.bernoulli(p)) veh.stuck_until = step + rehold_steps;
        } else if (veh.held() && step >= *veh.stuck_until) {
            if (rng_.bernoulli(p)) {
                veh.stuck_until = step + rehold_steps;
            } else {
                veh.stuck_until.reset();
            }
        }
        if (veh.held()) candidates[i] = 0.0;
    }
}

void World::collision_check(std::vector<double>& candidates) const {
    const double a1 = config_.safety.a1;
    const double a2 = config_.safety.a2;
    const double v_cc = config_.safety.v_cc;
    const double car_length = config_.road.car_length;
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
        const auto& veh = vehicles_[i];
        const double threshold = a1 * car_length + a2 * veh.v;
        auto cap_for_lane = [&](int lane) {
            const Vehicle* leader = find_leader(veh, lane);
            if (!leader) return;
            const double gap = leader->x - car_length - veh.x;
            if (gap <= threshold) {
                candidates[i] = std::min(candidates[i], std::max(0.0, leader->v - v_cc));
            }
        };
        cap_for_lane(veh.lane);
        if (veh.changing()) cap_for_lane(veh.lane_change->target_lane);
    }
}

StepReport World::step(const std::unordered_map<int, Action>& actions) {
    for (const auto& [id, action] : actions) {
        (void)action;
        if (!find(id)) {
            throw std::invalid_argument("action map references unknown vehicle id " +
                                        std::to_string(id));
        }
    }

    StepReport report;
    report.spawned = spawn_vehicles();

    auto action_for = [&](const Vehicle& v) {
        auto it = actions.find(v.id);
        return it == actions.end() ? Action::none : it->second;
    };

    for (auto& veh : vehicles_) {
        const Action a = action_for(veh);
        if (a == Action::left || a == Action::right) {
            if (begin_lane_change(veh, a)) report.lane_changes_started.push_back(veh.id);
        }
    }

    std::vector<double> candidates(vehicles_.size());
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
        const auto& veh = vehicles_[i];
        candidates[i] = newell_speed(veh.v, veh.v_exp, leader_gap(veh),
                                     action_for(veh) == Action::speedup,
                                     config_.car_following);
    }

    apply_bottleneck(candidates, step_);
    collision_check(candidates);

    const double dt = config_.road.dt;
    report.traces.reserve(vehicles_.size());
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
        auto& veh = vehicles_[i];
        const double x_before = veh.x;
        veh.v = candidates[i];
        veh.x += veh.v * dt;
        if (veh.changing()) {
            veh.y += veh.v_y * dt;
            auto& lc = *veh.lane_change;
            if (--lc.steps_remaining <= 0) {
                veh.lane = lc.target_lane;
                veh.y = config_.road.lane_center(veh.lane);
                veh.v_y = 0.0;
                veh.lane_change.reset();
            }
        }
        veh.speed_sum += veh.v;
        ++veh.speed_samples;
        report.traces.push_back({veh.id, veh.lane, x_before, veh.x, veh.v});
    }

    auto out = vehicles_.begin();
    for (auto& veh : vehicles_) {
        if (veh.x > config_.road.road_length) {
            report.exits.push_back(
                {veh.id, veh.spawn_step, step_,
                 veh.speed_samples > 0 ? veh.speed_sum / veh.speed_samples : 0.0});
            ++total_exited_;
        } else {
            *out++ = std::move(veh);
        }
    }
    vehicles_.erase(out, vehicles_.end());

    ++step_;
    return report;
}

}  // namespace lanesim

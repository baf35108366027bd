#include "lanesim/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace lanesim {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(key + ": expected a number, got '" + value + "'");
    }
}

long parse_long(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(key + ": expected an integer, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::runtime_error(key + ": expected true/false, got '" + value + "'");
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

ScenarioConfig ScenarioConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    ScenarioConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected 'key = value'");
        }
        try {
            cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return cfg;
}

void ScenarioConfig::set(const std::string& key, const std::string& value) {
    if (key == "road.lane_count") road.lane_count = static_cast<int>(parse_long(key, value));
    else if (key == "road.length") road.road_length = parse_double(key, value);
    else if (key == "road.lane_width") road.lane_width = parse_double(key, value);
    else if (key == "road.dt") road.dt = parse_double(key, value);
    else if (key == "road.car_length") road.car_length = parse_double(key, value);
    else if (key == "spawn.enabled") spawn.enabled = parse_bool(key, value);
    else if (key == "spawn.t_up") spawn.t_up = parse_double(key, value);
    else if (key == "spawn.jitter") spawn.jitter = parse_double(key, value);
    else if (key == "spawn.v_exp_min") spawn.v_exp_min = parse_double(key, value);
    else if (key == "spawn.v_exp_max") spawn.v_exp_max = parse_double(key, value);
    else if (key == "spawn.v_init_factor") spawn.v_init_factor = parse_double(key, value);
    else if (key == "car_following.c") car_following.c = parse_double(key, value);
    else if (key == "car_following.d") car_following.d = parse_double(key, value);
    else if (key == "car_following.v_acc") car_following.v_acc = parse_double(key, value);
    else if (key == "safety.a1") safety.a1 = parse_double(key, value);
    else if (key == "safety.a2") safety.a2 = parse_double(key, value);
    else if (key == "safety.v_cc") safety.v_cc = parse_double(key, value);
    else if (key == "lane_change.t_change") lane_change.t_change = parse_double(key, value);
    else if (key == "lane_change.lockout") lane_change.lockout = parse_bool(key, value);
    else if (key == "reward.alpha") reward.alpha = parse_double(key, value);
    else if (key == "reward.v_min") reward.v_min = parse_double(key, value);
    else if (key == "reward.v_max") reward.v_max = parse_double(key, value);
    else if (key == "reward.q_window") reward.q_window = parse_double(key, value);
    else if (key == "reward.q_ref") reward.q_ref = parse_double(key, value);
    else if (key == "dqn.gamma") dqn.gamma = parse_double(key, value);
    else if (key == "dqn.lr") dqn.lr = parse_double(key, value);
    else if (key == "dqn.eps_exploit") dqn.eps_exploit = parse_double(key, value);
    else if (key == "dqn.target_sync_period") dqn.target_sync_period = static_cast<int>(parse_long(key, value));
    else if (key == "dqn.batch_size") dqn.batch_size = static_cast<int>(parse_long(key, value));
    else if (key == "dqn.warmup") dqn.warmup = static_cast<int>(parse_long(key, value));
    else if (key == "dqn.replay_capacity") dqn.replay_capacity = parse_long(key, value);
    else if (key == "metrics.loop_spacing") metrics.loop_spacing = parse_double(key, value);
    else if (key == "metrics.window") metrics.window = parse_double(key, value);
    else if (key == "bottleneck.enabled") bottleneck_enabled = parse_bool(key, value);
    else if (key == "bottleneck.x") bottleneck.x_bottle = parse_double(key, value);
    else if (key == "bottleneck.zone_radius") bottleneck.zone_radius = parse_double(key, value);
    else if (key == "bottleneck.start_step") bottleneck.start_step = parse_long(key, value);
    else if (key == "bottleneck.end_step") bottleneck.end_step = parse_long(key, value);
    else if (key == "bottleneck.rehold_interval") bottleneck.rehold_interval = parse_double(key, value);
    else if (key == "total_steps") total_steps = parse_long(key, value);
    else if (key == "seed") seed = static_cast<std::uint64_t>(parse_long(key, value));
    else if (key == "log_interval") log_interval = parse_long(key, value);
    else throw std::runtime_error("unknown config key '" + key + "'");
}

void ScenarioConfig::validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw std::runtime_error(field + ": " + why);
    };
    if (road.lane_count < 2) fail("road.lane_count", "must be >= 2");
    if (road.road_length <= 0) fail("road.length", "must be positive");
    if (road.lane_width <= 0) fail("road.lane_width", "must be positive");
    if (road.dt <= 0) fail("road.dt", "must be positive");
    if (road.car_length <= 0) fail("road.car_length", "must be positive");
    if (spawn.t_up <= 0) fail("spawn.t_up", "must be positive");
    if (spawn.jitter < 0 || spawn.jitter >= 1) fail("spawn.jitter", "must be in [0, 1)");
    if (spawn.v_exp_min <= 0) fail("spawn.v_exp_min", "must be positive");
    if (spawn.v_exp_max < spawn.v_exp_min) fail("spawn.v_exp_max", "must be >= spawn.v_exp_min");
    if (spawn.v_init_factor <= 0 || spawn.v_init_factor > 1) {
        fail("spawn.v_init_factor", "must be in (0, 1]");
    }
    if (car_following.c <= 0) fail("car_following.c", "must be positive");
    if (car_following.v_acc <= 0) fail("car_following.v_acc", "must be positive");
    if (safety.a1 < 0) fail("safety.a1", "must be >= 0");
    if (safety.a2 < 0) fail("safety.a2", "must be >= 0");
    if (safety.v_cc < 0) fail("safety.v_cc", "must be >= 0");
    if (lane_change.t_change <= 0) fail("lane_change.t_change", "must be positive");
    if (reward.v_max <= reward.v_min) fail("reward.v_max", "must be > reward.v_min");
    if (reward.alpha < 0) fail("reward.alpha", "must be >= 0");
    if (reward.q_window <= 0) fail("reward.q_window", "must be positive");
    if (reward.q_ref <= 0) fail("reward.q_ref", "must be positive");
    if (dqn.gamma < 0 || dqn.gamma >= 1) fail("dqn.gamma", "must be in [0, 1)");
    if (dqn.lr <= 0) fail("dqn.lr", "must be positive");
    if (dqn.eps_exploit < 0 || dqn.eps_exploit > 1) fail("dqn.eps_exploit", "must be in [0, 1]");
    if (dqn.target_sync_period <= 0) fail("dqn.target_sync_period", "must be positive");
    if (dqn.batch_size <= 0) fail("dqn.batch_size", "must be positive");
    if (dqn.warmup < 1) fail("dqn.warmup", "must be >= 1");
    if (dqn.replay_capacity <= 0) fail("dqn.replay_capacity", "must be positive");
    if (metrics.window <= 0) fail("metrics.window", "must be positive");
    if (bottleneck_enabled) {
        if (bottleneck.zone_radius <= 0) fail("bottleneck.zone_radius", "must be positive");
        if (bottleneck.end_step <= bottleneck.start_step) {
            fail("bottleneck.end_step", "must be > bottleneck.start_step");
        }
        if (bottleneck.rehold_interval <= 0) fail("bottleneck.rehold_interval", "must be positive");
    }
    if (total_steps < 0) fail("total_steps", "must be >= 0");
    if (log_interval < 1) fail("log_interval", "must be >= 1");
}

std::string ScenarioConfig::serialize() const {
    std::ostringstream out;
    out << "road.lane_count = " << road.lane_count << '\n'
        << "road.length = " << fmt(road.road_length) << '\n'
        << "road.lane_width = " << fmt(road.lane_width) << '\n'
        << "road.dt = " << fmt(road.dt) << '\n'
        << "road.car_length = " << fmt(road.car_length) << '\n'
        << "spawn.enabled = " << (spawn.enabled ? "true" : "false") << '\n'
        << "spawn.t_up = " << fmt(spawn.t_up) << '\n'
        << "spawn.jitter = " << fmt(spawn.jitter) << '\n'
        << "spawn.v_exp_min = " << fmt(spawn.v_exp_min) << '\n'
        << "spawn.v_exp_max = " << fmt(spawn.v_exp_max) << '\n'
        << "spawn.v_init_factor = " << fmt(spawn.v_init_factor) << '\n'
        << "car_following.c = " << fmt(car_following.c) << '\n'
        << "car_following.d = " << fmt(car_following.d) << '\n'
        << "car_following.v_acc = " << fmt(car_following.v_acc) << '\n'
        << "safety.a1 = " << fmt(safety.a1) << '\n'
        << "safety.a2 = " << fmt(safety.a2) << '\n'
        << "safety.v_cc = " << fmt(safety.v_cc) << '\n'
        << "lane_change.t_change = " << fmt(lane_change.t_change) << '\n'
        << "lane_change.lockout = " << (lane_change.lockout ? "true" : "false") << '\n'
        << "reward.alpha = " << fmt(reward.alpha) << '\n'
        << "reward.v_min = " << fmt(reward.v_min) << '\n'
        << "reward.v_max = " << fmt(reward.v_max) << '\n'
        << "reward.q_window = " << fmt(reward.q_window) << '\n'
        << "reward.q_ref = " << fmt(reward.q_ref) << '\n'
        << "dqn.gamma = " << fmt(dqn.gamma) << '\n'
        << "dqn.lr = " << fmt(dqn.lr) << '\n'
        << "dqn.eps_exploit = " << fmt(dqn.eps_exploit) << '\n'
        << "dqn.target_sync_period = " << dqn.target_sync_period << '\n'
        << "dqn.batch_size = " << dqn.batch_size << '\n'
        << "dqn.warmup = " << dqn.warmup << '\n'
        << "dqn.replay_capacity = " << dqn.replay_capacity << '\n'
        << "metrics.loop_spacing = " << fmt(metrics.loop_spacing) << '\n'
        << "metrics.window = " << fmt(metrics.window) << '\n'
        << "bottleneck.enabled = " << (bottleneck_enabled ? "true" : "false") << '\n'
        << "bottleneck.x = " << fmt(bottleneck.x_bottle) << '\n'
        << "bottleneck.zone_radius = " << fmt(bottleneck.zone_radius) << '\n'
        << "bottleneck.start_step = " << bottleneck.start_step << '\n'
        << "bottleneck.end_step = " << bottleneck.end_step << '\n'
        << "bottleneck.rehold_interval = " << fmt(bottleneck.rehold_interval) << '\n'
        << "total_steps = " << total_steps << '\n'
        << "seed = " << seed << '\n'
        << "log_interval = " << log_interval << '\n';
    return out.str();
}

}  // namespace lanesim

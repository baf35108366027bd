#include "lanesim/runner.hpp"

#include <algorithm>
#include <unordered_map>

#include "lanesim/reward.hpp"
#include "lanesim/snapshot.hpp"

namespace lanesim {

namespace {

// Stream tags for deriving independent RNG sequences from one master seed.
constexpr std::uint64_t kAgentStream = 0x22;
constexpr std::uint64_t kReplayStream = 0x33;

struct PendingExperience {
    int id = 0;
    AgentState s;
    Action a = Action::none;
};

// Chooses one action per vehicle that is free to act. States are assembled
// from the per-vehicle history rings and evaluated in a single batch.
class PolicyDriver {
public:
    PolicyDriver(const ScenarioConfig& cfg, double eps_exploit)
        : eps_(eps_exploit), rng_(derive_seed(cfg.seed, kAgentStream)) {}

    void select(const QNetwork& net, const World& world,
                std::unordered_map<int, Action>& actions,
                std::vector<PendingExperience>& pending) {
        actions.clear();
        pending.clear();
        actors_.clear();
        for (const auto& veh : world.vehicles()) {
            if (!veh.changing()) actors_.push_back(veh.id);
        }
        if (actors_.empty()) return;

        states_.clear();
        states_.reserve(actors_.size());
        for (int id : actors_) states_.push_back(histories_.at(id).state());

        ws_.resize(static_cast<int>(actors_.size()));
        for (std::size_t i = 0; i < actors_.size(); ++i) ws_.load(static_cast<int>(i), states_[i]);
        forward(net, ws_);

        for (std::size_t i = 0; i < actors_.size(); ++i) {
            const Action a = select_action(q_values(ws_, static_cast<int>(i)), eps_, rng_);
            actions.emplace(actors_[i], a);
            pending.push_back({actors_[i], std::move(states_[i]), a});
        }
    }

    // Appends the current frame for every live vehicle (new vehicles start
    // their ring here) and drops rings of exited ones.
    void refresh_histories(const World& world, const StepReport& report) {
        for (const auto& veh : world.vehicles()) {
            histories_[veh.id].push(extract_snapshot(world, veh), veh.v - veh.v_exp);
        }
        for (const auto& exit : report.exits) histories_.erase(exit.vehicle_id);
    }

    const AgentState state_of(int id) const { return histories_.at(id).state(); }

private:
    double eps_;
    Rng rng_;
    std::unordered_map<int, StateHistory> histories_;
    std::vector<int> actors_;
    std::vector<AgentState> states_;
    BatchWorkspace ws_;
};

}  // namespace

TrainResult train(const ScenarioConfig& cfg) {
    cfg.validate();

    TrainResult result{QNetwork::random_init(cfg.seed), {}, 0};
    QNetwork target = result.net;
    QNetwork grads = QNetwork::zeros();
    ReplayBuffer buffer(static_cast<std::size_t>(cfg.dqn.replay_capacity));
    Rng replay_rng(derive_seed(cfg.seed, kReplayStream));

    World world(cfg.world_config(), cfg.seed);
    LoopDetectors detectors =
        LoopDetectors::spaced(cfg.metrics.loop_spacing, cfg.road.road_length);
    PolicyDriver driver(cfg, cfg.dqn.eps_exploit);

    BatchWorkspace ws_online, ws_target;
    std::unordered_map<int, Action> actions;
    std::vector<PendingExperience> pending;
    result.log.reserve(static_cast<std::size_t>(cfg.total_steps));

    for (long t = 0; t < cfg.total_steps; ++t) {
        driver.select(result.net, world, actions, pending);
        const StepReport report = world.step(actions);
        detectors.record(t, report.traces);
        driver.refresh_histories(world, report);

        auto changed = report.lane_changes_started;  // already id-ordered
        double reward_sum = 0.0;
        long reward_count = 0;
        for (auto& pe : pending) {
            const Vehicle* veh = world.find(pe.id);
            if (!veh) continue;  // exited vehicles stop producing experiences
            const bool changed_lane = std::binary_search(changed.begin(), changed.end(), pe.id);
            const double q_t = measure_q(detectors, veh->x, t, cfg.road.dt,
                                         cfg.road.lane_count, cfg.reward);
            const double r =
                compute_reward(veh->v - veh->v_exp, changed_lane, q_t, cfg.reward);
            reward_sum += r;
            ++reward_count;
            buffer.push({std::move(pe.s), pe.a, r, driver.state_of(pe.id)});
        }

        double loss = 0.0;
        if (buffer.size() >= static_cast<std::size_t>(cfg.dqn.warmup)) {
            const auto batch =
                buffer.sample(static_cast<std::size_t>(cfg.dqn.batch_size), replay_rng);
            loss = td_loss(result.net, target, batch, cfg.dqn.gamma, grads, ws_online,
                           ws_target);
            sgd_step(result.net, grads, cfg.dqn.lr);
            if (++result.updates % cfg.dqn.target_sync_period == 0) {
                sync_target(result.net, target);
            }
        }

        double speed_sum = 0.0;
        for (const auto& veh : world.vehicles()) speed_sum += veh.v;
        const double mean_speed =
            world.vehicles().empty() ? 0.0
                                     : speed_sum / static_cast<double>(world.vehicles().size());
        result.log.push_back(
            {t, loss, reward_count > 0 ? reward_sum / reward_count : 0.0, mean_speed});
    }
    return result;
}

EvalResult evaluate(const ScenarioConfig& cfg, const QNetwork& net,
                    const TrajectorySink& trajectory) {
    cfg.validate();
    net.check_shapes();

    World world(cfg.world_config(), cfg.seed);
    LoopDetectors detectors =
        LoopDetectors::spaced(cfg.metrics.loop_spacing, cfg.road.road_length);
    PolicyDriver driver(cfg, 1.0);  // greedy

    EvalResult result;
    SpeedAccumulator speeds;
    const long tail_start = cfg.total_steps - cfg.total_steps / 10;
    std::vector<double> tail_speed_sum(cfg.road.lane_count, 0.0);
    std::vector<long> tail_samples(cfg.road.lane_count, 0);
    long lane_changes = 0;

    std::unordered_map<int, Action> actions;
    std::vector<PendingExperience> pending;

    for (long t = 0; t < cfg.total_steps; ++t) {
        driver.select(net, world, actions, pending);
        const StepReport report = world.step(actions);
        detectors.record(t, report.traces);
        driver.refresh_histories(world, report);

        lane_changes += static_cast<long>(report.lane_changes_started.size());
        for (const auto& veh : world.vehicles()) {
            speeds.add(veh.v, veh.v_exp);
            if (t >= tail_start) {
                tail_speed_sum[veh.lane] += veh.v;
                ++tail_samples[veh.lane];
            }
        }
        for (const auto& exit : report.exits) result.exits.push_back(exit);

        if (trajectory && (t % cfg.log_interval) == 0) {
            for (const auto& veh : world.vehicles()) {
                trajectory({t, veh.id, veh.lane, veh.x, veh.y, veh.v, veh.v_y,
                            veh.changing()});
            }
        }
    }

    auto& summary = result.summary;
    summary.mean_speed = speeds.samples > 0 ? speeds.mean() : 0.0;
    summary.mean_expected_speed = speeds.samples > 0 ? speeds.mean_expected() : 0.0;
    summary.lane_changes = lane_changes;
    const double vehicle_km = speeds.sum * cfg.road.dt / 1000.0;
    summary.lane_changes_per_vehicle_km =
        vehicle_km > 0.0 ? static_cast<double>(lane_changes) / vehicle_km : 0.0;
    summary.total_spawned = world.total_spawned();
    summary.total_exited = world.total_exited();
    const int last_loop = detectors.most_downstream();
    if (last_loop >= 0 && cfg.total_steps > 0) {
        const double horizon_h = static_cast<double>(cfg.total_steps) * cfg.road.dt / 3600.0;
        summary.throughput_veh_per_h =
            static_cast<double>(detectors.loops()[last_loop].crossings.size()) / horizon_h;
    }
    summary.tail_lane_mean_speed.resize(cfg.road.lane_count, 0.0);
    for (int lane = 0; lane < cfg.road.lane_count; ++lane) {
        if (tail_samples[lane] > 0) {
            summary.tail_lane_mean_speed[lane] =
                tail_speed_sum[lane] / static_cast<double>(tail_samples[lane]);
        }
    }
    result.flow_density =
        aggregate_series(detectors, cfg.total_steps, cfg.metrics.window, cfg.road.dt);
    return result;
}

}  // namespace lanesim

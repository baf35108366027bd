#include <benchmark/benchmark.h>

#include "lanesim/dqn.hpp"
#include "lanesim/runner.hpp"
#include "lanesim/snapshot.hpp"

using namespace lanesim;

namespace {

World dense_world(int vehicles, std::uint64_t seed) {
    WorldConfig cfg;
    cfg.road.lane_count = 3;
    cfg.spawn.enabled = false;
    World world(cfg, seed);
    Rng rng(seed);
    for (int i = 0; i < vehicles; ++i) {
        world.add_vehicle(static_cast<int>(rng.uniform_int(3)), rng.uniform(0.0, 1900.0),
                          rng.uniform(5.0, 28.0), rng.uniform(11.2, 30.5));
    }
    return world;
}

AgentState probe_state(std::uint64_t seed) {
    Rng rng(seed);
    AgentState s;
    for (auto& frame : s.frames) {
        for (auto& cell : frame.cells) cell = rng.bernoulli(0.2) ? 1 : 0;
    }
    for (auto& dv : s.dv) dv = -rng.uniform(0.0, 15.0);
    return s;
}

void bm_world_step(benchmark::State& state) {
    World world = dense_world(static_cast<int>(state.range(0)), 1);
    Rng rng(2);
    for (auto _ : state) {
        std::unordered_map<int, Action> actions;
        for (const auto& veh : world.vehicles()) {
            actions[veh.id] = static_cast<Action>(rng.uniform_int(4));
        }
        benchmark::DoNotOptimize(world.step(actions));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_world_step)->Arg(100)->Arg(400);

void bm_snapshot_extract(benchmark::State& state) {
    World world = dense_world(static_cast<int>(state.range(0)), 3);
    for (auto _ : state) {
        for (const auto& veh : world.vehicles()) {
            benchmark::DoNotOptimize(extract_snapshot(world, veh));
        }
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_snapshot_extract)->Arg(100)->Arg(400);

void bm_forward_batch(benchmark::State& state) {
    const QNetwork net = QNetwork::random_init(4);
    const int batch = static_cast<int>(state.range(0));
    BatchWorkspace ws;
    ws.resize(batch);
    for (int i = 0; i < batch; ++i) ws.load(i, probe_state(i));
    for (auto _ : state) {
        forward(net, ws);
        benchmark::DoNotOptimize(ws.out.data());
    }
    state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(bm_forward_batch)->Arg(1)->Arg(32)->Arg(256);

void bm_training_update(benchmark::State& state) {
    const QNetwork online = QNetwork::random_init(5);
    const QNetwork target = QNetwork::random_init(6);
    Rng rng(7);
    std::vector<Experience> owned;
    for (int i = 0; i < 32; ++i) {
        Experience e;
        e.s = probe_state(i);
        e.s_next = probe_state(i + 100);
        e.a = static_cast<Action>(rng.uniform_int(4));
        e.r = rng.uniform(-1.0, 1.0);
        owned.push_back(std::move(e));
    }
    std::vector<const Experience*> batch;
    for (const auto& e : owned) batch.push_back(&e);
    QNetwork net = online;
    QNetwork grads = QNetwork::zeros();
    BatchWorkspace ws_a, ws_b;
    for (auto _ : state) {
        const double loss = td_loss(net, target, batch, 0.9, grads, ws_a, ws_b);
        sgd_step(net, grads, 0.01);
        benchmark::DoNotOptimize(loss);
    }
}
BENCHMARK(bm_training_update);

}  // namespace

BENCHMARK_MAIN();

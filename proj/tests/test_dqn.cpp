#include <doctest.h>

#include <cmath>

#include "lanesim/dqn.hpp"
#include "lanesim/runner.hpp"
#include "support.hpp"

using namespace lanesim;
using namespace lanesim::testing;

namespace {

std::span<const double, shapes::kOut> as_q(const std::array<double, 4>& q) {
    return std::span<const double, shapes::kOut>(q.data(), 4);
}

}  // namespace

TEST_CASE("select_action: full exploitation is the argmax") {
    Rng rng(1);
    const std::array<double, 4> q = {0.1, 2.0, -3.0, 1.9};
    for (int i = 0; i < 100; ++i) CHECK(select_action(as_q(q), 1.0, rng) == Action::right);
}

TEST_CASE("select_action: ties break toward the lowest index") {
    Rng rng(1);
    const std::array<double, 4> q = {1.0, 1.0, 0.5, 0.0};
    CHECK(argmax_action(as_q(q)) == Action::left);
    for (int i = 0; i < 50; ++i) CHECK(select_action(as_q(q), 1.0, rng) == Action::left);
}

TEST_CASE("select_action: pure exploration is uniform") {
    Rng rng(1234);
    const std::array<double, 4> q = {5.0, 0.0, 0.0, 0.0};
    std::array<long, 4> counts{};
    const int n = 10000;
    for (int i = 0; i < n; ++i) ++counts[static_cast<int>(select_action(as_q(q), 0.0, rng))];
    for (long c : counts) {
        const double freq = static_cast<double>(c) / n;
        CHECK(freq > 0.23);
        CHECK(freq < 0.27);
    }
}

TEST_CASE("replay: oldest experiences are evicted first") {
    ReplayBuffer buffer(3);
    for (int i = 0; i < 5; ++i) {
        Experience e;
        e.r = static_cast<double>(i);
        buffer.push(std::move(e));
    }
    CHECK(buffer.size() == 3);
    // 0 and 1 evicted; 2, 3, 4 retained in some ring order
    std::array<bool, 5> present{};
    for (std::size_t i = 0; i < buffer.size(); ++i) {
        present[static_cast<int>(buffer[i].r)] = true;
    }
    CHECK_FALSE(present[0]);
    CHECK_FALSE(present[1]);
    CHECK(present[2]);
    CHECK(present[3]);
    CHECK(present[4]);
}

TEST_CASE("replay: sampling with replacement from a single item") {
    ReplayBuffer buffer(10);
    Experience e;
    e.r = 42.0;
    buffer.push(std::move(e));
    Rng rng(2);
    const auto batch = buffer.sample(4, rng);
    REQUIRE(batch.size() == 4);
    for (const Experience* item : batch) CHECK(item->r == 42.0);
    CHECK(buffer.size() == 1);  // sampling never mutates
}

TEST_CASE("replay: empty buffers cannot be sampled") {
    ReplayBuffer buffer(10);
    Rng rng(2);
    CHECK_THROWS_AS(buffer.sample(4, rng), std::runtime_error);
}

TEST_CASE("replay: draw frequencies pass a chi-square uniformity test") {
    const std::size_t items = 200;
    ReplayBuffer buffer(items);
    for (std::size_t i = 0; i < items; ++i) {
        Experience e;
        e.r = static_cast<double>(i);
        buffer.push(std::move(e));
    }
    Rng rng(99);
    std::vector<long> counts(items, 0);
    const long draws = 100000;
    for (long block = 0; block < draws / 1000; ++block) {
        for (const Experience* item : buffer.sample(1000, rng)) {
            ++counts[static_cast<std::size_t>(item->r)];
        }
    }
    const double expected = static_cast<double>(draws) / items;
    double chi2 = 0.0;
    for (long c : counts) {
        const double d = static_cast<double>(c) - expected;
        chi2 += d * d / expected;
    }
    // Wilson-Hilferty upper 1% quantile for dof = items - 1
    const double dof = static_cast<double>(items - 1);
    const double z99 = 2.3263478740408408;
    const double base = 1.0 - 2.0 / (9.0 * dof) + z99 * std::sqrt(2.0 / (9.0 * dof));
    const double critical = dof * base * base * base;
    CHECK(chi2 < critical);
}

namespace {

// A network with zero weights and chosen output biases computes a constant
// Q row; handy for hand-checkable TD targets.
QNetwork biased_net(const std::array<double, 4>& out_bias) {
    QNetwork net = QNetwork::zeros();
    for (int i = 0; i < 4; ++i) net.out_b[i] = out_bias[i];
    return net;
}

}  // namespace

TEST_CASE("td_loss: hand-evaluated single transition") {
    const QNetwork online = biased_net({2.5, 0.0, 0.0, 0.0});
    const QNetwork target = biased_net({2.0, 1.0, 0.0, 0.0});
    Rng rng(1);
    Experience e = random_experience(rng);
    e.a = Action::left;  // index 0
    e.r = 1.0;
    const std::vector<const Experience*> batch = {&e};
    QNetwork grads = QNetwork::zeros();
    BatchWorkspace ws_a, ws_b;
    const double loss = td_loss(online, target, batch, 0.9, grads, ws_a, ws_b);
    // (1 + 0.9*2 - 2.5)^2 = 0.09
    CHECK(loss == doctest::Approx(0.09));
    // d loss / d Q(s,a) = -2 * 0.3; everything upstream of the bias is zero
    CHECK(grads.out_b[0] == doctest::Approx(-0.6));
    CHECK(grads.out_b[1] == 0.0);
}

TEST_CASE("td_loss: gamma 0 with Q(s,a) = r is a zero of the loss") {
    const QNetwork online = biased_net({0.7, 0.0, 0.0, 0.0});
    const QNetwork target = biased_net({123.0, 0.0, 0.0, 0.0});  // irrelevant at gamma 0
    Rng rng(2);
    std::vector<Experience> owned;
    std::vector<const Experience*> batch;
    for (int i = 0; i < 8; ++i) {
        Experience e = random_experience(rng);
        e.a = Action::left;
        e.r = 0.7;
        owned.push_back(e);
    }
    for (const auto& e : owned) batch.push_back(&e);
    QNetwork grads = QNetwork::zeros();
    BatchWorkspace ws_a, ws_b;
    CHECK(td_loss(online, target, batch, 0.0, grads, ws_a, ws_b) == doctest::Approx(0.0));
}

TEST_CASE("td_loss: the bootstrap fixed point has zero loss") {
    const double gamma = 0.9;
    const double c = 1.5;
    const QNetwork online = biased_net({c, 0.0, 0.0, 0.0});
    const QNetwork target = online;  // synced
    Rng rng(3);
    Experience e = random_experience(rng);
    e.a = Action::left;
    e.r = (1.0 - gamma) * c;
    const std::vector<const Experience*> batch = {&e};
    QNetwork grads = QNetwork::zeros();
    BatchWorkspace ws_a, ws_b;
    CHECK(td_loss(online, target, batch, gamma, grads, ws_a, ws_b) ==
          doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("td_loss: loss is nonnegative and zero only at zero TD error") {
    Rng rng(4);
    std::vector<Experience> owned;
    std::vector<const Experience*> batch;
    for (int i = 0; i < 16; ++i) owned.push_back(random_experience(rng));
    for (const auto& e : owned) batch.push_back(&e);
    const QNetwork online = QNetwork::random_init(8);
    const QNetwork target = QNetwork::random_init(9);
    QNetwork grads = QNetwork::zeros();
    BatchWorkspace ws_a, ws_b;
    CHECK(td_loss(online, target, batch, 0.9, grads, ws_a, ws_b) >= 0.0);
}

TEST_CASE("sgd_step: zero gradients and zero rates are no-ops") {
    QNetwork net = QNetwork::random_init(10);
    const QNetwork before = net;
    sgd_step(net, QNetwork::zeros(), 0.01);
    CHECK(net.fc1_w == before.fc1_w);
    QNetwork grads = QNetwork::random_init(11);
    sgd_step(net, grads, 0.0);
    CHECK(net.fc1_w == before.fc1_w);
}

TEST_CASE("sgd_step: descends a one-parameter quadratic to its minimum") {
    QNetwork net = QNetwork::zeros();  // theta = out_b[0] = 0
    QNetwork grads = QNetwork::zeros();
    for (int i = 0; i < 100; ++i) {
        grads.out_b[0] = 2.0 * (net.out_b[0] - 3.0);  // d/dtheta (theta-3)^2
        sgd_step(net, grads, 0.1);
    }
    CHECK(net.out_b[0] == doctest::Approx(3.0).epsilon(1e-7));
}

TEST_CASE("sgd_step: mismatched shapes are rejected") {
    QNetwork net = QNetwork::random_init(1);
    QNetwork grads = QNetwork::zeros();
    grads.fc2_b.resize(7);
    CHECK_THROWS_AS(sgd_step(net, grads, 0.1), std::invalid_argument);
}

TEST_CASE("sync_target: copies now, freezes later") {
    QNetwork online = QNetwork::random_init(20);
    QNetwork target = QNetwork::zeros();
    sync_target(online, target);
    Rng rng(21);
    const AgentState s = random_state(rng);
    const auto q_before = forward_single(target, s);
    {
        const auto qo = forward_single(online, s);
        for (int i = 0; i < 4; ++i) CHECK(qo[i] == q_before[i]);
    }
    // a subsequent online update must not leak into the target
    QNetwork grads = QNetwork::random_init(22);
    sgd_step(online, grads, 0.05);
    const auto q_after = forward_single(target, s);
    for (int i = 0; i < 4; ++i) CHECK(q_after[i] == q_before[i]);
    const auto q_online = forward_single(online, s);
    bool moved = false;
    for (int i = 0; i < 4; ++i) moved = moved || q_online[i] != q_before[i];
    CHECK(moved);
}

namespace {

ScenarioConfig tiny_scenario() {
    ScenarioConfig cfg;
    cfg.road.lane_count = 2;
    cfg.road.road_length = 300.0;
    cfg.spawn.t_up = 5.0;
    cfg.dqn.warmup = 20;
    cfg.dqn.batch_size = 8;
    cfg.metrics.loop_spacing = 100.0;
    cfg.total_steps = 250;
    cfg.seed = 31;
    return cfg;
}

}  // namespace

TEST_CASE("train: zero steps returns the fresh network and an empty log") {
    ScenarioConfig cfg = tiny_scenario();
    cfg.total_steps = 0;
    const TrainResult result = train(cfg);
    CHECK(result.log.empty());
    CHECK(result.updates == 0);
    const QNetwork fresh = QNetwork::random_init(cfg.seed);
    CHECK(result.net.fc1_w == fresh.fc1_w);
    CHECK(result.net.out_b == fresh.out_b);
}

TEST_CASE("train: fixed seeds reproduce the run exactly") {
    const ScenarioConfig cfg = tiny_scenario();
    const TrainResult a = train(cfg);
    const TrainResult b = train(cfg);
    REQUIRE(a.log.size() == b.log.size());
    for (std::size_t i = 0; i < a.log.size(); ++i) {
        CHECK(a.log[i].loss == b.log[i].loss);
        CHECK(a.log[i].mean_reward == b.log[i].mean_reward);
        CHECK(a.log[i].mean_speed == b.log[i].mean_speed);
    }
    CHECK(a.net.fc1_w == b.net.fc1_w);
    CHECK(a.updates == b.updates);
    CHECK(a.updates > 0);
}

TEST_CASE("evaluate: greedy rollouts are deterministic") {
    const ScenarioConfig cfg = tiny_scenario();
    const QNetwork net = QNetwork::random_init(5);
    const EvalResult a = evaluate(cfg, net);
    const EvalResult b = evaluate(cfg, net);
    CHECK(a.summary.mean_speed == b.summary.mean_speed);
    CHECK(a.summary.lane_changes == b.summary.lane_changes);
    CHECK(a.exits.size() == b.exits.size());
}

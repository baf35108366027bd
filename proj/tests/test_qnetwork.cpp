#include <doctest.h>

#include <cmath>

#include "lanesim/qnetwork.hpp"
#include "support.hpp"

using namespace lanesim;
using namespace lanesim::testing;

TEST_CASE("shapes: the layer chain is pinned at compile time") {
    // 3x3x20 -> 16x2x10 -> 32x1x5 -> 160 -> 163 -> 500 -> 100 -> 4
    static_assert(shapes::kConv1Rows == 2 && shapes::kConv1Cols == 10);
    static_assert(shapes::kConv2Rows == 1 && shapes::kConv2Cols == 5);
    static_assert(shapes::kFlat == 160);
    static_assert(shapes::kConcat == 163);
    static_assert(shapes::kFc1 == 500 && shapes::kFc2 == 100 && shapes::kOut == 4);
    const QNetwork net = QNetwork::zeros();
    CHECK(net.parameter_count() == 192 + 16 + 2048 + 32 + 500 * 163 + 500 + 100 * 500 + 100 +
                                       400 + 4);
}

TEST_CASE("forward: the zero network outputs zeros") {
    const QNetwork net = QNetwork::zeros();
    Rng rng(1);
    const auto q = forward_single(net, random_state(rng));
    for (double v : q) CHECK(v == 0.0);
}

TEST_CASE("forward: outputs are finite for random nets and states") {
    Rng rng(2);
    for (int i = 0; i < 20; ++i) {
        const QNetwork net = QNetwork::random_init(i);
        const auto q = forward_single(net, random_state(rng));
        for (double v : q) CHECK(std::isfinite(v));
    }
}

TEST_CASE("forward: seeded initialization and evaluation are reproducible") {
    const QNetwork a = QNetwork::random_init(77);
    const QNetwork b = QNetwork::random_init(77);
    CHECK(a.conv1_w == b.conv1_w);
    CHECK(a.fc1_w == b.fc1_w);
    CHECK(a.out_w == b.out_w);
    CHECK(a.conv1_b == b.conv1_b);  // biases start at zero
    Rng rng(3);
    const AgentState s = random_state(rng);
    const auto qa = forward_single(a, s);
    const auto qb = forward_single(b, s);
    for (int i = 0; i < shapes::kOut; ++i) CHECK(qa[i] == qb[i]);
}

TEST_CASE("forward: batched and single-state paths agree") {
    const QNetwork net = QNetwork::random_init(5);
    Rng rng(6);
    std::vector<AgentState> states;
    for (int i = 0; i < 7; ++i) states.push_back(random_state(rng));
    BatchWorkspace ws;
    ws.resize(7);
    for (int i = 0; i < 7; ++i) ws.load(i, states[i]);
    forward(net, ws);
    for (int i = 0; i < 7; ++i) {
        const auto single = forward_single(net, states[i]);
        const auto batch = q_values(ws, i);
        for (int a = 0; a < shapes::kOut; ++a) CHECK(single[a] == batch[a]);
    }
}

TEST_CASE("shapes: malformed parameter tensors are rejected") {
    QNetwork net = QNetwork::random_init(1);
    net.fc1_w.resize(100);
    CHECK_THROWS_AS(net.check_shapes(), std::invalid_argument);
    BatchWorkspace ws;
    ws.resize(1);
    Rng rng(1);
    ws.load(0, random_state(rng));
    CHECK_THROWS_AS(forward(net, ws), std::invalid_argument);
}

TEST_CASE("gradients: analytic matches central finite differences") {
    Rng rng(11);
    for (int trial = 0; trial < 3; ++trial) {
        const QNetwork online = QNetwork::random_init(100 + trial);
        const QNetwork target = QNetwork::random_init(200 + trial);
        std::vector<Experience> owned;
        for (int i = 0; i < 4; ++i) owned.push_back(random_experience(rng));
        std::vector<const Experience*> batch;
        for (const auto& e : owned) batch.push_back(&e);
        const double worst =
            gradient_check_worst(online, target, batch, 0.9, 1e-5, 4, rng);
        CHECK(worst < 1e-4);
    }
}

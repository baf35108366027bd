#include "lanesim/dqn.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace lanesim {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("replay capacity must be positive");
    items_.reserve(capacity_);
}

void ReplayBuffer::push(Experience e) {
    if (!std::isfinite(e.r)) throw std::invalid_argument("experience reward must be finite");
    if (items_.size() < capacity_) {
        items_.push_back(std::move(e));
    } else {
        items_[head_] = std::move(e);
        head_ = (head_ + 1) % capacity_;
    }
}

std::vector<const Experience*> ReplayBuffer::sample(std::size_t batch, Rng& rng) const {
    if (items_.empty()) throw std::runtime_error("replay buffer is empty");
    std::vector<const Experience*> out(batch);
    for (auto& slot : out) slot = &items_[rng.uniform_int(items_.size())];
    return out;
}

Action argmax_action(std::span<const double, shapes::kOut> q) {
    int best = 0;
    for (int i = 1; i < shapes::kOut; ++i) {
        if (q[i] > q[best]) best = i;
    }
    return static_cast<Action>(best);
}

Action select_action(std::span<const double, shapes::kOut> q, double eps_exploit, Rng& rng) {
    if (rng.uniform() < eps_exploit) return argmax_action(q);
    return static_cast<Action>(rng.uniform_int(kActionCount));
}

Action select_action(const QNetwork& net, const AgentState& s, double eps_exploit, Rng& rng) {
    // Keep the draw order fixed: the exploit draw happens before any Q
    // evaluation so seeded runs do not depend on exploration outcomes.
    const bool exploit = rng.uniform() < eps_exploit;
    if (!exploit) return static_cast<Action>(rng.uniform_int(kActionCount));
    const auto q = forward_single(net, s);
    return argmax_action(std::span<const double, shapes::kOut>(q));
}

double td_loss(const QNetwork& online, const QNetwork& target,
               std::span<const Experience* const> batch, double gamma,
               QNetwork& grads, BatchWorkspace& ws_online, BatchWorkspace& ws_target) {
    if (batch.empty()) throw std::invalid_argument("td_loss: empty batch");
    const int n = static_cast<int>(batch.size());
    ws_online.resize(n);
    ws_target.resize(n);
    for (int i = 0; i < n; ++i) {
        ws_online.load(i, batch[i]->s);
        ws_target.load(i, batch[i]->s_next);
    }
    forward(online, ws_online);
    forward(target, ws_target);

    grads.set_zero();
    std::vector<double> d_out(std::size_t(n) * shapes::kOut, 0.0);
    double loss = 0.0;
    const double inv_n = 1.0 / static_cast<double>(n);
    for (int i = 0; i < n; ++i) {
        const auto q_next = q_values(ws_target, i);
        double best_next = q_next[0];
        for (int a = 1; a < shapes::kOut; ++a) best_next = std::max(best_next, q_next[a]);

        const int a = static_cast<int>(batch[i]->a);
        const double q_sa = q_values(ws_online, i)[a];
        const double err = batch[i]->r + gamma * best_next - q_sa;
        loss += err * err * inv_n;
        // d(mean err^2)/dQ(s,a); the bootstrap term is constant.
        d_out[std::size_t(i) * shapes::kOut + a] = -2.0 * err * inv_n;
    }
    backward(online, ws_online, d_out, grads);
    return loss;
}

void sgd_step(QNetwork& net, const QNetwork& grads, double lr) {
    net.check_shapes();
    grads.check_shapes();
    auto dst = net.tensors();
    auto src = grads.tensors();
    for (std::size_t t = 0; t < dst.size(); ++t) {
        double* p = dst[t].data->data();
        const double* g = src[t].data->data();
        const std::size_t n = dst[t].data->size();
        for (std::size_t i = 0; i < n; ++i) p[i] -= lr * g[i];
    }
}

void sync_target(const QNetwork& online, QNetwork& target) {
    online.check_shapes();
    target = online;
}

}  // namespace lanesim

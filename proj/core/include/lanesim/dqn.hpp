#pragma once

#include <vector>

#include "lanesim/qnetwork.hpp"
#include "lanesim/rng.hpp"

namespace lanesim {

struct DqnConfig {
    double gamma = 0.9;
    double lr = 0.01;
    double eps_exploit = 0.9;   // probability of the greedy action
    int target_sync_period = 500;  // online->target copies, in updates
    int batch_size = 32;
    int warmup = 500;           // min buffer size before learning
    long replay_capacity = 2000;
};

struct Experience {
    AgentState s;
    Action a = Action::none;
    double r = 0.0;
    AgentState s_next;
};

// Fixed-capacity ring; oldest experience is evicted first. Sampling is
// uniform with replacement and never mutates the buffer.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Experience e);
    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Experience& operator[](std::size_t i) const { return items_[i]; }

    // Throws std::runtime_error on an empty buffer.
    std::vector<const Experience*> sample(std::size_t batch, Rng& rng) const;

private:
    std::size_t capacity_;
    std::size_t head_ = 0;
    std::vector<Experience> items_;
};

// Greedy argmax; ties break toward the lowest action index.
Action argmax_action(std::span<const double, shapes::kOut> q);

// Exploit with probability eps_exploit, otherwise a uniform action.
Action select_action(std::span<const double, shapes::kOut> q, double eps_exploit, Rng& rng);
Action select_action(const QNetwork& net, const AgentState& s, double eps_exploit, Rng& rng);

// Mean squared TD error over the batch with a frozen bootstrap target;
// fills grads with dLoss/dtheta for the online network and returns the loss.
double td_loss(const QNetwork& online, const QNetwork& target,
               std::span<const Experience* const> batch, double gamma,
               QNetwork& grads, BatchWorkspace& ws_online, BatchWorkspace& ws_target);

// theta <- theta - lr * grad, elementwise; shapes must match.
void sgd_step(QNetwork& net, const QNetwork& grads, double lr);

void sync_target(const QNetwork& online, QNetwork& target);

}  // namespace lanesim

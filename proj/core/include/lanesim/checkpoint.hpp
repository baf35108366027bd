#pragma once

#include <string>

#include "lanesim/dqn.hpp"

namespace lanesim {

struct Checkpoint {
    QNetwork net;
    DqnConfig dqn;
};

// Versioned little-endian binary container: an 8-byte magic, the DQN
// hyperparameters, then the ten parameter tensors in network order
// (conv1 w/b, conv2 w/b, fc1 w/b, fc2 w/b, head w/b), each as a length
// followed by raw doubles. Loading round-trips bitwise.
void save_checkpoint(const std::string& path, const QNetwork& net, const DqnConfig& dqn);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace lanesim

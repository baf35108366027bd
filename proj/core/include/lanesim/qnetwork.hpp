#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "lanesim/snapshot.hpp"

namespace lanesim {

// Layer geometry. Convolutions are unpadded with patch 2x2 and stride
// (1, 2) = (lane axis, longitudinal axis); the three snapshot frames are
// the input channels.
namespace shapes {
inline constexpr int kChannels = 3;
inline constexpr int kRows = TrafficSnapshot::kRows;   // 3
inline constexpr int kCols = TrafficSnapshot::kCols;   // 20
inline constexpr int kPatch = 2;
inline constexpr int kStrideRows = 1;
inline constexpr int kStrideCols = 2;

inline constexpr int kConv1Filters = 16;
inline constexpr int kConv1Rows = (kRows - kPatch) / kStrideRows + 1;  // 2
inline constexpr int kConv1Cols = (kCols - kPatch) / kStrideCols + 1;  // 10
inline constexpr int kConv2Filters = 32;
inline constexpr int kConv2Rows = (kConv1Rows - kPatch) / kStrideRows + 1;  // 1
inline constexpr int kConv2Cols = (kConv1Cols - kPatch) / kStrideCols + 1;  // 5

inline constexpr int kFlat = kConv2Filters * kConv2Rows * kConv2Cols;  // 160
inline constexpr int kDv = 3;
inline constexpr int kConcat = kFlat + kDv;  // 163
inline constexpr int kFc1 = 500;
inline constexpr int kFc2 = 100;
inline constexpr int kOut = 4;

static_assert(kConv1Rows == 2 && kConv1Cols == 10);
static_assert(kConv2Rows == 1 && kConv2Cols == 5);
static_assert(kFlat == 160 && kConcat == 163);
}  // namespace shapes

// Parameters of the decision network (also used as a gradient container:
// a gradient is a network-shaped bag of numbers).
struct QNetwork {
    std::vector<double> conv1_w, conv1_b;
    std::vector<double> conv2_w, conv2_b;
    std::vector<double> fc1_w, fc1_b;
    std::vector<double> fc2_w, fc2_b;
    std::vector<double> out_w, out_b;

    static QNetwork zeros();
    // Fan-in-scaled uniform weights, zero biases.
    static QNetwork random_init(std::uint64_t seed);

    struct TensorView {
        const char* name;
        std::vector<double>* data;
        std::size_t expected_size;
    };
    std::array<TensorView, 10> tensors();

    struct ConstTensorView {
        const char* name;
        const std::vector<double>* data;
        std::size_t expected_size;
    };
    std::array<ConstTensorView, 10> tensors() const;

    std::size_t parameter_count() const;
    void set_zero();
    // Throws std::invalid_argument naming the offending tensor.
    void check_shapes() const;
};

// Per-batch input and activation buffers, reusable across calls. Post-ReLU
// activations are cached; backward derives the ReLU mask from them.
class BatchWorkspace {
public:
    void resize(int batch);
    int batch() const { return batch_; }

    void load(int slot, const AgentState& state);

    std::vector<double> input;   // [B][3][3][20]
    std::vector<double> conv1;   // [B][16][2][10]
    std::vector<double> conv2;   // [B][32][1][5]
    std::vector<double> concat;  // [B][163]
    std::vector<double> fc1;     // [B][500]
    std::vector<double> fc2;     // [B][100]
    std::vector<double> out;     // [B][4]

    // backward scratch
    std::vector<double> d_fc2, d_fc1, d_concat, d_conv2, d_conv1;

private:
    int batch_ = 0;
};

// Forward pass over every loaded slot.
void forward(const QNetwork& net, BatchWorkspace& ws);

inline std::span<const double, shapes::kOut> q_values(const BatchWorkspace& ws, int slot) {
    return std::span<const double, shapes::kOut>(ws.out.data() + slot * shapes::kOut,
                                                 shapes::kOut);
}

// Accumulates dLoss/dtheta into grads given dLoss/dout for every slot.
// Requires a preceding forward() on the same workspace.
void backward(const QNetwork& net, BatchWorkspace& ws, std::span<const double> d_out,
              QNetwork& grads);

// Single-state convenience (tests, probes).
std::array<double, shapes::kOut> forward_single(const QNetwork& net, const AgentState& s);

}  // namespace lanesim

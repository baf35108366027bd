#include "lanesim/qnetwork.hpp"

#include <cassert>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "lanesim/rng.hpp"

namespace lanesim {

using namespace shapes;

namespace {

constexpr std::size_t kConv1W = std::size_t(kConv1Filters) * kChannels * kPatch * kPatch;
constexpr std::size_t kConv2W = std::size_t(kConv2Filters) * kConv1Filters * kPatch * kPatch;
constexpr std::size_t kFc1W = std::size_t(kFc1) * kConcat;
constexpr std::size_t kFc2W = std::size_t(kFc2) * kFc1;
constexpr std::size_t kOutW = std::size_t(kOut) * kFc2;

// Dot product with four running sums; order is fixed, results are
// reproducible run to run.
double dot(const double* a, const double* b, int n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

void axpy(double coef, const double* x, double* y, int n) {
    for (int i = 0; i < n; ++i) y[i] += coef * x[i];
}

// y[o] = relu(w[o] . x + b[o]); batch-tiled so weight rows are reused
// across the tile instead of re-streamed per sample.
void fc_forward(const double* w, const double* b, const double* x, double* y,
                int batch, int in, int out, bool relu) {
    constexpr int kTile = 24;
    for (int b0 = 0; b0 < batch; b0 += kTile) {
        const int b1 = std::min(b0 + kTile, batch);
        for (int o = 0; o < out; ++o) {
            const double* wrow = w + std::size_t(o) * in;
            for (int s = b0; s < b1; ++s) {
                double acc = b[o] + dot(wrow, x + std::size_t(s) * in, in);
                if (relu && acc < 0.0) acc = 0.0;
                y[std::size_t(s) * out + o] = acc;
            }
        }
    }
}

}  // namespace

QNetwork QNetwork::zeros() {
    QNetwork net;
    net.conv1_w.assign(kConv1W, 0.0);
    net.conv1_b.assign(kConv1Filters, 0.0);
    net.conv2_w.assign(kConv2W, 0.0);
    net.conv2_b.assign(kConv2Filters, 0.0);
    net.fc1_w.assign(kFc1W, 0.0);
    net.fc1_b.assign(kFc1, 0.0);
    net.fc2_w.assign(kFc2W, 0.0);
    net.fc2_b.assign(kFc2, 0.0);
    net.out_w.assign(kOutW, 0.0);
    net.out_b.assign(kOut, 0.0);
    return net;
}

QNetwork QNetwork::random_init(std::uint64_t seed) {
    QNetwork net = zeros();
    Rng rng(derive_seed(seed, 0x44));
    auto fill = [&](std::vector<double>& w, int fan_in) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (auto& value : w) value = rng.uniform(-bound, bound);
    };
    fill(net.conv1_w, kChannels * kPatch * kPatch);
    fill(net.conv2_w, kConv1Filters * kPatch * kPatch);
    fill(net.fc1_w, kConcat);
    fill(net.fc2_w, kFc1);
    fill(net.out_w, kFc2);
    return net;
}

std::array<QNetwork::TensorView, 10> QNetwork::tensors() {
    return {{{"conv1_w", &conv1_w, kConv1W},
             {"conv1_b", &conv1_b, kConv1Filters},
             {"conv2_w", &conv2_w, kConv2W},
             {"conv2_b", &conv2_b, kConv2Filters},
             {"fc1_w", &fc1_w, kFc1W},
             {"fc1_b", &fc1_b, kFc1},
             {"fc2_w", &fc2_w, kFc2W},
             {"fc2_b", &fc2_b, kFc2},
             {"out_w", &out_w, kOutW},
             {"out_b", &out_b, kOut}}};
}

std::array<QNetwork::ConstTensorView, 10> QNetwork::tensors() const {
    return {{{"conv1_w", &conv1_w, kConv1W},
             {"conv1_b", &conv1_b, kConv1Filters},
             {"conv2_w", &conv2_w, kConv2W},
             {"conv2_b", &conv2_b, kConv2Filters},
             {"fc1_w", &fc1_w, kFc1W},
             {"fc1_b", &fc1_b, kFc1},
             {"fc2_w", &fc2_w, kFc2W},
             {"fc2_b", &fc2_b, kFc2},
             {"out_w", &out_w, kOutW},
             {"out_b", &out_b, kOut}}};
}

std::size_t QNetwork::parameter_count() const {
    std::size_t n = 0;
    for (const auto& t : tensors()) n += t.data->size();
    return n;
}

void QNetwork::set_zero() {
    for (auto& t : tensors()) std::fill(t.data->begin(), t.data->end(), 0.0);
}

void QNetwork::check_shapes() const {
    for (const auto& t : tensors()) {
        if (t.data->size() != t.expected_size) {
            throw std::invalid_argument(std::string("QNetwork tensor ") + t.name +
                                        ": expected " + std::to_string(t.expected_size) +
                                        " values, got " + std::to_string(t.data->size()));
        }
    }
}

void BatchWorkspace::resize(int batch) {
    if (batch == batch_ && !input.empty()) return;  // buffers are fully rewritten per pass
    batch_ = batch;
    const auto n = static_cast<std::size_t>(batch);
    input.assign(n * kChannels * kRows * kCols, 0.0);
    conv1.assign(n * kConv1Filters * kConv1Rows * kConv1Cols, 0.0);
    conv2.assign(n * kConv2Filters * kConv2Rows * kConv2Cols, 0.0);
    concat.assign(n * kConcat, 0.0);
    fc1.assign(n * kFc1, 0.0);
    fc2.assign(n * kFc2, 0.0);
    out.assign(n * kOut, 0.0);
    d_fc2.assign(n * kFc2, 0.0);
    d_fc1.assign(n * kFc1, 0.0);
    d_concat.assign(n * kConcat, 0.0);
    d_conv2.assign(n * kConv2Filters * kConv2Rows * kConv2Cols, 0.0);
    d_conv1.assign(n * kConv1Filters * kConv1Rows * kConv1Cols, 0.0);
}

void BatchWorkspace::load(int slot, const AgentState& state) {
    assert(slot >= 0 && slot < batch_);
    double* in = input.data() + std::size_t(slot) * kChannels * kRows * kCols;
    for (int ch = 0; ch < kChannels; ++ch) {
        const auto& cells = state.frames[ch].cells;
        for (int i = 0; i < kRows * kCols; ++i) {
            in[ch * kRows * kCols + i] = static_cast<double>(cells[i]);
        }
    }
    double* z = concat.data() + std::size_t(slot) * kConcat;
    for (int k = 0; k < kDv; ++k) z[kFlat + k] = state.dv[k];
}

void forward(const QNetwork& net, BatchWorkspace& ws) {
    net.check_shapes();
    const int batch = ws.batch();

    // conv1: [3][3][20] -> [16][2][10]
    for (int s = 0; s < batch; ++s) {
        const double* in = ws.input.data() + std::size_t(s) * kChannels * kRows * kCols;
        double* y = ws.conv1.data() + std::size_t(s) * kConv1Filters * kConv1Rows * kConv1Cols;
        for (int f = 0; f < kConv1Filters; ++f) {
            const double* w = net.conv1_w.data() + std::size_t(f) * kChannels * kPatch * kPatch;
            for (int r = 0; r < kConv1Rows; ++r) {
                for (int c = 0; c < kConv1Cols; ++c) {
                    double acc = net.conv1_b[f];
                    for (int ch = 0; ch < kChannels; ++ch) {
                        const double* plane = in + (std::size_t(ch) * kRows + r * kStrideRows) * kCols +
                                              c * kStrideCols;
                        const double* wp = w + std::size_t(ch) * kPatch * kPatch;
                        acc += wp[0] * plane[0] + wp[1] * plane[1] +
                               wp[2] * plane[kCols] + wp[3] * plane[kCols + 1];
                    }
                    y[(std::size_t(f) * kConv1Rows + r) * kConv1Cols + c] = acc > 0.0 ? acc : 0.0;
                }
            }
        }
    }

    // conv2: [16][2][10] -> [32][1][5]
    for (int s = 0; s < batch; ++s) {
        const double* in = ws.conv1.data() + std::size_t(s) * kConv1Filters * kConv1Rows * kConv1Cols;
        double* y = ws.conv2.data() + std::size_t(s) * kConv2Filters * kConv2Rows * kConv2Cols;
        for (int f = 0; f < kConv2Filters; ++f) {
            const double* w = net.conv2_w.data() + std::size_t(f) * kConv1Filters * kPatch * kPatch;
            for (int r = 0; r < kConv2Rows; ++r) {
                for (int c = 0; c < kConv2Cols; ++c) {
                    double acc = net.conv2_b[f];
                    for (int ch = 0; ch < kConv1Filters; ++ch) {
                        const double* plane = in + (std::size_t(ch) * kConv1Rows + r * kStrideRows) * kConv1Cols +
                                              c * kStrideCols;
                        const double* wp = w + std::size_t(ch) * kPatch * kPatch;
                        acc += wp[0] * plane[0] + wp[1] * plane[1] +
                               wp[2] * plane[kConv1Cols] + wp[3] * plane[kConv1Cols + 1];
                    }
                    y[(std::size_t(f) * kConv2Rows + r) * kConv2Cols + c] = acc > 0.0 ? acc : 0.0;
                }
            }
        }
        // flatten into the concat buffer (dv scalars were set by load())
        double* z = ws.concat.data() + std::size_t(s) * kConcat;
        std::memcpy(z, y, sizeof(double) * kFlat);
    }

    fc_forward(net.fc1_w.data(), net.fc1_b.data(), ws.concat.data(), ws.fc1.data(),
               batch, kConcat, kFc1, true);
    fc_forward(net.fc2_w.data(), net.fc2_b.data(), ws.fc1.data(), ws.fc2.data(),
               batch, kFc1, kFc2, true);
    fc_forward(net.out_w.data(), net.out_b.data(), ws.fc2.data(), ws.out.data(),
               batch, kFc2, kOut, false);
}

void backward(const QNetwork& net, BatchWorkspace& ws, std::span<const double> d_out,
              QNetwork& grads) {
    grads.check_shapes();
    const int batch = ws.batch();
    if (d_out.size() != std::size_t(batch) * kOut) {
        throw std::invalid_argument("backward: d_out size mismatch");
    }

    std::fill(ws.d_fc2.begin(), ws.d_fc2.end(), 0.0);
    std::fill(ws.d_fc1.begin(), ws.d_fc1.end(), 0.0);
    std::fill(ws.d_concat.begin(), ws.d_concat.end(), 0.0);
    std::fill(ws.d_conv1.begin(), ws.d_conv1.end(), 0.0);

    // output layer
    for (int s = 0; s < batch; ++s) {
        const double* h = ws.fc2.data() + std::size_t(s) * kFc2;
        double* dh = ws.d_fc2.data() + std::size_t(s) * kFc2;
        for (int o = 0; o < kOut; ++o) {
            const double g = d_out[std::size_t(s) * kOut + o];
            if (g == 0.0) continue;
            grads.out_b[o] += g;
            axpy(g, h, grads.out_w.data() + std::size_t(o) * kFc2, kFc2);
            axpy(g, net.out_w.data() + std::size_t(o) * kFc2, dh, kFc2);
        }
        for (int i = 0; i < kFc2; ++i) {
            if (h[i] <= 0.0) dh[i] = 0.0;
        }
    }

    // fc2
    for (int s = 0; s < batch; ++s) {
        const double* h = ws.fc1.data() + std::size_t(s) * kFc1;
        const double* dh_up = ws.d_fc2.data() + std::size_t(s) * kFc2;
        double* dh = ws.d_fc1.data() + std::size_t(s) * kFc1;
        for (int o = 0; o < kFc2; ++o) {
            const double g = dh_up[o];
            if (g == 0.0) continue;
            grads.fc2_b[o] += g;
            axpy(g, h, grads.fc2_w.data() + std::size_t(o) * kFc1, kFc1);
            axpy(g, net.fc2_w.data() + std::size_t(o) * kFc1, dh, kFc1);
        }
        for (int i = 0; i < kFc1; ++i) {
            if (h[i] <= 0.0) dh[i] = 0.0;
        }
    }

    // fc1
    for (int s = 0; s < batch; ++s) {
        const double* z = ws.concat.data() + std::size_t(s) * kConcat;
        const double* dh_up = ws.d_fc1.data() + std::size_t(s) * kFc1;
        double* dz = ws.d_concat.data() + std::size_t(s) * kConcat;
        for (int o = 0; o < kFc1; ++o) {
            const double g = dh_up[o];
            if (g == 0.0) continue;
            grads.fc1_b[o] += g;
            axpy(g, z, grads.fc1_w.data() + std::size_t(o) * kConcat, kConcat);
            axpy(g, net.fc1_w.data() + std::size_t(o) * kConcat, dz, kConcat);
        }
    }

    // split the concat gradient; the dv inputs need no further propagation
    for (int s = 0; s < batch; ++s) {
        const double* dz = ws.d_concat.data() + std::size_t(s) * kConcat;
        const double* post = ws.conv2.data() + std::size_t(s) * kFlat;
        double* dcv = ws.d_conv2.data() + std::size_t(s) * kFlat;
        for (int i = 0; i < kFlat; ++i) {
            dcv[i] = post[i] > 0.0 ? dz[i] : 0.0;
        }
    }

    // conv2
    for (int s = 0; s < batch; ++s) {
        const double* in = ws.conv1.data() + std::size_t(s) * kConv1Filters * kConv1Rows * kConv1Cols;
        const double* dy = ws.d_conv2.data() + std::size_t(s) * kConv2Filters * kConv2Rows * kConv2Cols;
        double* din = ws.d_conv1.data() + std::size_t(s) * kConv1Filters * kConv1Rows * kConv1Cols;
        for (int f = 0; f < kConv2Filters; ++f) {
            const double* w = net.conv2_w.data() + std::size_t(f) * kConv1Filters * kPatch * kPatch;
            double* gw = grads.conv2_w.data() + std::size_t(f) * kConv1Filters * kPatch * kPatch;
            for (int r = 0; r < kConv2Rows; ++r) {
                for (int c = 0; c < kConv2Cols; ++c) {
                    const double g = dy[(std::size_t(f) * kConv2Rows + r) * kConv2Cols + c];
                    if (g == 0.0) continue;
                    grads.conv2_b[f] += g;
                    for (int ch = 0; ch < kConv1Filters; ++ch) {
                        const std::size_t base = (std::size_t(ch) * kConv1Rows + r * kStrideRows) * kConv1Cols +
                                                 c * kStrideCols;
                        double* gwp = gw + std::size_t(ch) * kPatch * kPatch;
                        const double* wp = w + std::size_t(ch) * kPatch * kPatch;
                        gwp[0] += g * in[base];
                        gwp[1] += g * in[base + 1];
                        gwp[2] += g * in[base + kConv1Cols];
                        gwp[3] += g * in[base + kConv1Cols + 1];
                        din[base] += g * wp[0];
                        din[base + 1] += g * wp[1];
                        din[base + kConv1Cols] += g * wp[2];
                        din[base + kConv1Cols + 1] += g * wp[3];
                    }
                }
            }
        }
        for (std::size_t i = 0; i < std::size_t(kConv1Filters) * kConv1Rows * kConv1Cols; ++i) {
            if (in[i] <= 0.0) din[i] = 0.0;
        }
    }

    // conv1 (input gradient not needed)
    for (int s = 0; s < batch; ++s) {
        const double* in = ws.input.data() + std::size_t(s) * kChannels * kRows * kCols;
        const double* dy = ws.d_conv1.data() + std::size_t(s) * kConv1Filters * kConv1Rows * kConv1Cols;
        for (int f = 0; f < kConv1Filters; ++f) {
            double* gw = grads.conv1_w.data() + std::size_t(f) * kChannels * kPatch * kPatch;
            for (int r = 0; r < kConv1Rows; ++r) {
                for (int c = 0; c < kConv1Cols; ++c) {
                    const double g = dy[(std::size_t(f) * kConv1Rows + r) * kConv1Cols + c];
                    if (g == 0.0) continue;
                    grads.conv1_b[f] += g;
                    for (int ch = 0; ch < kChannels; ++ch) {
                        const std::size_t base = (std::size_t(ch) * kRows + r * kStrideRows) * kCols +
                                                 c * kStrideCols;
                        double* gwp = gw + std::size_t(ch) * kPatch * kPatch;
                        gwp[0] += g * in[base];
                        gwp[1] += g * in[base + 1];
                        gwp[2] += g * in[base + kCols];
                        gwp[3] += g * in[base + kCols + 1];
                    }
                }
            }
        }
    }
}

std::array<double, kOut> forward_single(const QNetwork& net, const AgentState& s) {
    BatchWorkspace ws;
    ws.resize(1);
    ws.load(0, s);
    forward(net, ws);
    std::array<double, kOut> q{};
    const auto view = q_values(ws, 0);
    std::copy(view.begin(), view.end(), q.begin());
    return q;
}

}  // namespace lanesim

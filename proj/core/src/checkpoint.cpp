#include "lanesim/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace lanesim {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'L', 'S', 'D', 'Q', 'N', '0', '0', '1'};

template <typename T>
void write_pod(std::ostream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void read_pod(std::istream& in, T& value) {
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw std::runtime_error("checkpoint: truncated file");
}

}  // namespace

void save_checkpoint(const std::string& path, const QNetwork& net, const DqnConfig& dqn) {
    net.check_shapes();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out.write(kMagic, sizeof(kMagic));
    write_pod(out, dqn.gamma);
    write_pod(out, dqn.lr);
    write_pod(out, dqn.eps_exploit);
    write_pod(out, static_cast<std::int64_t>(dqn.target_sync_period));
    write_pod(out, static_cast<std::int64_t>(dqn.batch_size));
    write_pod(out, static_cast<std::int64_t>(dqn.warmup));
    write_pod(out, static_cast<std::int64_t>(dqn.replay_capacity));
    for (const auto& tensor : net.tensors()) {
        write_pod(out, static_cast<std::uint64_t>(tensor.data->size()));
        out.write(reinterpret_cast<const char*>(tensor.data->data()),
                  static_cast<std::streamsize>(tensor.data->size() * sizeof(double)));
    }
    if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw std::runtime_error("not a lanesim checkpoint (bad magic): " + path);
    }
    Checkpoint ckpt;
    ckpt.net = QNetwork::zeros();
    read_pod(in, ckpt.dqn.gamma);
    read_pod(in, ckpt.dqn.lr);
    read_pod(in, ckpt.dqn.eps_exploit);
    std::int64_t v = 0;
    read_pod(in, v);
    ckpt.dqn.target_sync_period = static_cast<int>(v);
    read_pod(in, v);
    ckpt.dqn.batch_size = static_cast<int>(v);
    read_pod(in, v);
    ckpt.dqn.warmup = static_cast<int>(v);
    read_pod(in, v);
    ckpt.dqn.replay_capacity = v;
    for (auto& tensor : ckpt.net.tensors()) {
        std::uint64_t size = 0;
        read_pod(in, size);
        if (size != tensor.expected_size) {
            throw std::runtime_error(std::string("checkpoint tensor ") + tensor.name +
                                     ": expected " + std::to_string(tensor.expected_size) +
                                     " values, got " + std::to_string(size));
        }
        in.read(reinterpret_cast<char*>(tensor.data->data()),
                static_cast<std::streamsize>(size * sizeof(double)));
        if (!in) throw std::runtime_error("checkpoint: truncated tensor data");
    }
    return ckpt;
}

}  // namespace lanesim

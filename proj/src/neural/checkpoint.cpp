#include "hqsl/neural/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

namespace hqsl::neural {

namespace {

constexpr char kMagic[4] = {'H', 'Q', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw std::runtime_error("checkpoint truncated");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f64(std::ostream& os, double d) {
    std::uint64_t u;
    std::memcpy(&u, &d, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw std::runtime_error("checkpoint truncated");
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double d;
    std::memcpy(&d, &u, 8);
    return d;
}

}  // namespace

void save_checkpoint(const std::string& path, const std::vector<NamedTensor>& tensors) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + path);
    os.write(kMagic, 4);
    put_u32(os, kVersion);
    put_u32(os, static_cast<std::uint32_t>(tensors.size()));
    for (const auto& t : tensors) {
        put_u32(os, static_cast<std::uint32_t>(t.name.size()));
        os.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
        const unsigned char rank = static_cast<unsigned char>(t.shape.size());
        os.write(reinterpret_cast<const char*>(&rank), 1);
        for (std::size_t d : t.shape) put_u32(os, static_cast<std::uint32_t>(d));
        for (double v : t.data) put_f64(os, v);
    }
    if (!os) throw std::runtime_error("checkpoint write failed: " + path);
}

std::vector<NamedTensor> load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0) {
        throw std::runtime_error("not a checkpoint file: " + path);
    }
    const std::uint32_t version = get_u32(is);
    if (version != kVersion) {
        throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
    }
    const std::uint32_t count = get_u32(is);
    std::vector<NamedTensor> out(count);
    for (auto& t : out) {
        const std::uint32_t len = get_u32(is);
        t.name.resize(len);
        is.read(t.name.data(), len);
        unsigned char rank = 0;
        is.read(reinterpret_cast<char*>(&rank), 1);
        if (!is) throw std::runtime_error("checkpoint truncated");
        t.shape.resize(rank);
        for (auto& d : t.shape) d = get_u32(is);
        t.data.resize(numel(t.shape));
        for (auto& v : t.data) v = get_f64(is);
    }
    return out;
}

std::vector<NamedTensor> snapshot(Layer& layer, const std::string& prefix) {
    std::vector<NamedTensor> out;
    for (const auto& p : layer.params()) {
        out.push_back({prefix + p.name, p.shape, *p.value});
    }
    for (const auto& p : layer.buffers()) {
        out.push_back({prefix + p.name, p.shape, *p.value});
    }
    return out;
}

void restore(Layer& layer, const std::vector<NamedTensor>& tensors,
             const std::string& prefix) {
    std::unordered_map<std::string, const NamedTensor*> by_name;
    for (const auto& t : tensors) by_name[t.name] = &t;
    auto apply = [&](const ParamRef& p) {
        const auto it = by_name.find(prefix + p.name);
        if (it == by_name.end()) {
            throw std::runtime_error("checkpoint is missing tensor " + prefix + p.name);
        }
        if (it->second->shape != p.shape || it->second->data.size() != p.value->size()) {
            throw std::runtime_error("checkpoint shape mismatch for " + prefix + p.name);
        }
        *p.value = it->second->data;
    };
    for (const auto& p : layer.params()) apply(p);
    for (const auto& p : layer.buffers()) apply(p);
}

}  // namespace hqsl::neural

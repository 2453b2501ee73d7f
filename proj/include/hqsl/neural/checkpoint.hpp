#pragma once

#include <string>
#include <vector>

#include "hqsl/neural/layers.hpp"
#include "hqsl/neural/tensor.hpp"

namespace hqsl::neural {

struct NamedTensor {
    std::string name;
    Shape shape;
    std::vector<double> data;
};

// Versioned binary weight file: magic "HQCK", u32 version, u32 tensor count,
// then per tensor: u32 name length, name bytes, u8 rank, u32 dims,
// little-endian float64 payload.
void save_checkpoint(const std::string& path, const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> load_checkpoint(const std::string& path);

// Snapshot / restore of a layer tree's parameters and buffers, in order.
std::vector<NamedTensor> snapshot(Layer& layer, const std::string& prefix = "");
void restore(Layer& layer, const std::vector<NamedTensor>& tensors,
             const std::string& prefix = "");

}  // namespace hqsl::neural

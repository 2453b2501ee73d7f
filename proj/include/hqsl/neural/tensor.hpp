#pragma once

#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace hqsl::neural {

using Shape = std::vector<std::size_t>;

inline std::size_t numel(const Shape& s) {
    std::size_t n = 1;
    for (std::size_t d : s) n *= d;
    return n;
}

// Dense row-major array of doubles. Gradients are not stored here; layers
// own gradient buffers for their parameters and backward passes return
// activation gradients as plain tensors.
struct Tensor {
    Shape shape;
    std::vector<double> v;

    Tensor() = default;
    explicit Tensor(Shape s) : shape(std::move(s)), v(numel(shape), 0.0) {}
    Tensor(Shape s, std::vector<double> data) : shape(std::move(s)), v(std::move(data)) {
        if (v.size() != numel(shape)) {
            throw std::invalid_argument("tensor data does not match shape");
        }
    }

    std::size_t size() const { return v.size(); }
    std::size_t dim(std::size_t i) const { return shape.at(i); }
    std::size_t rank() const { return shape.size(); }

    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }

    // Leading dimension is the batch in every layer contract.
    std::size_t batch() const { return shape.empty() ? 0 : shape[0]; }
    std::size_t per_sample() const { return batch() ? size() / batch() : 0; }

    Tensor reshaped(Shape s) const {
        if (numel(s) != size()) throw std::invalid_argument("reshape changes element count");
        return Tensor(std::move(s), v);
    }
};

inline std::string shape_str(const Shape& s) {
    std::string out = "(";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(s[i]);
    }
    return out + ")";
}

}  // namespace hqsl::neural

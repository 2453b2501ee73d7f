#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "hqsl/neural/tensor.hpp"

namespace hqsl::neural {

// View into layer-owned parameter storage. `grad` is null for persistent
// buffers that are saved but not trained (batch-norm running stats).
struct ParamRef {
    std::string name;
    Shape shape;
    std::vector<double>* value = nullptr;
    std::vector<double>* grad = nullptr;
};

class Layer {
public:
    virtual ~Layer() = default;

    // Backward requires a preceding forward; layers cache what they need and
    // accumulate parameter gradients (callers zero them via the optimizer).
    virtual Tensor forward(const Tensor& x, bool training) = 0;
    virtual Tensor backward(const Tensor& grad_out) = 0;

    virtual std::vector<ParamRef> params() { return {}; }
    virtual std::vector<ParamRef> buffers() { return {}; }
    virtual std::string kind() const = 0;
};

std::size_t param_count(Layer& layer);

class Dense : public Layer {
public:
    Dense(std::size_t in, std::size_t out, std::mt19937_64& init_rng);

    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& grad_out) override;
    std::vector<ParamRef> params() override;
    std::string kind() const override { return "dense"; }

    std::size_t in_dim() const { return in_; }
    std::size_t out_dim() const { return out_; }
    std::vector<double>& weights() { return w_; }
    std::vector<double>& bias() { return b_; }

private:
    std::size_t in_, out_;
    std::vector<double> w_, b_, dw_, db_;
    Tensor cached_x_;
    bool have_input_ = false;
};

class Relu : public Layer {
public:
    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& grad_out) override;
    std::string kind() const override { return "relu"; }

private:
    Tensor cached_x_;
    bool have_input_ = false;
};

class Sigmoid : public Layer {
public:
    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& grad_out) override;
    std::string kind() const override { return "sigmoid"; }

private:
    Tensor cached_y_;
    bool have_input_ = false;
};

// Inverted dropout: kept units scale by 1/(1-p) in training, identity at
// inference. Mask draws come from the layer's own seeded stream.
class Dropout : public Layer {
public:
    Dropout(double p, std::uint64_t seed);

    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& grad_out) override;
    std::string kind() const override { return "dropout"; }

private:
    double p_;
    std::mt19937_64 rng_;
    std::vector<double> mask_;
    bool have_input_ = false;
};

class Flatten : public Layer {
public:
    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& grad_out) override;
    std::string kind() const override { return "flatten"; }

private:
    Shape cached_shape_;
    bool have_input_ = false;
};

// Fixed per-sample target shape; the batch dimension passes through.
class Reshape : public Layer {
public:
    explicit Reshape(Shape per_sample) : target_(std::move(per_sample)) {}

    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& grad_out) override;
    std::string kind() const override { return "reshape"; }

private:
    Shape target_;
    Shape cached_shape_;
    bool have_input_ = false;
};

// 2-D convolution, stride 1. Input (N, C, H, W).
class Conv2D : public Layer {
public:
    Conv2D(std::size_t in_ch, std::size_t out_ch, std::size_t kernel, std::size_t padding,
           std::mt19937_64& init_rng);

    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& grad_out) override;
    std::vector<ParamRef> params() override;
    std::string kind() const override { return "conv2d"; }

private:
    std::size_t ic_, oc_, k_, pad_;
    std::vector<double> w_, b_, dw_, db_;
    Tensor cached_x_;
    bool have_input_ = false;
};

// Kernel 2, stride 2 max pooling.
class MaxPool2D : public Layer {
public:
    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& grad_out) override;
    std::string kind() const override { return "maxpool2d"; }

private:
    Shape cached_shape_;
    std::vector<std::size_t> argmax_;
    bool have_input_ = false;
};

// Normalizes per feature for rank-2 input and per channel for rank-4 input.
// Batch statistics in training (updating running stats), running stats at
// inference.
class BatchNorm : public Layer {
public:
    explicit BatchNorm(std::size_t features, double momentum = 0.1, double eps = 1e-5);

    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& grad_out) override;
    std::vector<ParamRef> params() override;
    std::vector<ParamRef> buffers() override;
    std::string kind() const override { return "batchnorm"; }

private:
    std::size_t f_;
    double momentum_, eps_;
    std::vector<double> gamma_, beta_, dgamma_, dbeta_;
    std::vector<double> run_mean_, run_var_;
    // forward cache
    Tensor cached_xhat_;
    std::vector<double> cached_inv_std_;
    std::size_t cached_group_ = 0;
    bool have_input_ = false;
};

// Nearest-neighbour upsampling by an integer factor.
class Upsample2D : public Layer {
public:
    explicit Upsample2D(std::size_t factor) : f_(factor) {}

    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& grad_out) override;
    std::string kind() const override { return "upsample2d"; }

private:
    std::size_t f_;
    Shape cached_shape_;
    bool have_input_ = false;
};

// Transposed 2-D convolution. Output spatial size: (in-1)*stride - 2*pad + k.
class TransposeConv2D : public Layer {
public:
    TransposeConv2D(std::size_t in_ch, std::size_t out_ch, std::size_t kernel,
                    std::size_t stride, std::size_t padding, std::mt19937_64& init_rng);

    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& grad_out) override;
    std::vector<ParamRef> params() override;
    std::string kind() const override { return "transposeconv2d"; }

private:
    std::size_t ic_, oc_, k_, stride_, pad_;
    std::vector<double> w_, b_, dw_, db_;
    Tensor cached_x_;
    bool have_input_ = false;
};

class Sequential : public Layer {
public:
    Sequential() = default;

    Sequential& add(std::unique_ptr<Layer> layer);
    template <typename L, typename... Args>
    Sequential& emplace(Args&&... args) {
        return add(std::make_unique<L>(std::forward<Args>(args)...));
    }

    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& grad_out) override;
    std::vector<ParamRef> params() override;
    std::vector<ParamRef> buffers() override;
    std::string kind() const override { return "sequential"; }

    std::size_t size() const { return layers_.size(); }
    Layer& at(std::size_t i) { return *layers_.at(i); }

private:
    std::vector<std::unique_ptr<Layer>> layers_;
};

// Sum of a main branch and a skip branch evaluated on the same input.
class Residual : public Layer {
public:
    Residual(std::unique_ptr<Layer> main, std::unique_ptr<Layer> skip)
        : main_(std::move(main)), skip_(std::move(skip)) {}

    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& grad_out) override;
    std::vector<ParamRef> params() override;
    std::vector<ParamRef> buffers() override;
    std::string kind() const override { return "residual"; }

private:
    std::unique_ptr<Layer> main_, skip_;
};

}  // namespace hqsl::neural

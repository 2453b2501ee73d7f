#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hqsl/neural/checkpoint.hpp"
#include "hqsl/neural/layers.hpp"
#include "hqsl/neural/loss.hpp"
#include "hqsl/qlayer/layer.hpp"

namespace hqsl::models {

// Adapts a quantum circuit to the layer interface: (N, M) classical features
// in, (N, Q) expectations out, two-point shift gradients on the way back.
class QuantumFrontLayer : public neural::Layer {
public:
    QuantumFrontLayer(qlayer::CircuitSpec spec, std::mt19937_64& init_rng);

    neural::Tensor forward(const neural::Tensor& x, bool training) override;
    neural::Tensor backward(const neural::Tensor& grad_out) override;
    std::vector<neural::ParamRef> params() override;
    std::string kind() const override { return "quantum"; }

    qlayer::QuantumLayer& layer() { return layer_; }
    const qlayer::QuantumLayer& layer() const { return layer_; }

private:
    qlayer::QuantumLayer layer_;
    std::vector<double> dtheta_;
    neural::Tensor cached_x_;
    bool have_input_ = false;
};

struct VariantConfig {
    int variant = 1;        // 1: binary sigmoid head, 2: n-class logits head
    int num_classes = 1;    // used by variant 2 (n >= 2)
    bool quantum_front = true;
    int circuit_id = 6;     // catalog id for the quantum front
    std::uint64_t seed = 42;
    double dropout_rate = 0.25;
    qsim::EvalMode eval_mode = qsim::EvalMode::analytic();
};

// Client stack, server front (quantum circuit or its classical stand-in,
// a dense layer with ReLU), and the remaining server stack. The same layer
// objects serve both the split and the centralized execution form.
struct SplitModel {
    VariantConfig config;
    neural::Sequential client;
    std::unique_ptr<neural::Layer> front;
    neural::Sequential server_rest;
    std::size_t cut_dim = 3;
    neural::LossKind loss_kind = neural::LossKind::BCE;

    neural::Tensor client_forward(const neural::Tensor& x, bool training);
    neural::Tensor server_forward(const neural::Tensor& smashed, bool training);
    neural::Tensor centralized_forward(const neural::Tensor& x, bool training);

    // Gradient of the loss w.r.t. the smashed data, accumulating server
    // parameter gradients on the way.
    neural::Tensor server_backward(const neural::Tensor& grad_out);
    void client_backward(const neural::Tensor& grad_smashed);

    std::vector<neural::ParamRef> client_params();
    std::vector<neural::ParamRef> server_params();  // front + rest
    std::vector<neural::ParamRef> all_params();

    std::vector<neural::NamedTensor> state();
    void load_state(const std::vector<neural::NamedTensor>& tensors);

    int predict_class(const neural::Tensor& output_row, std::size_t row) const;
};

SplitModel build_variant1(const VariantConfig& config);
SplitModel build_variant2(const VariantConfig& config);
SplitModel build_variant(const VariantConfig& config);

}  // namespace hqsl::models

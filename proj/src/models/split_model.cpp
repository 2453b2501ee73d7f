#include "hqsl/models/split_model.hpp"

#include <stdexcept>

#include "hqsl/common/rng.hpp"
#include "hqsl/qlayer/circuit.hpp"

namespace hqsl::models {

using neural::Tensor;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

QuantumFrontLayer::QuantumFrontLayer(qlayer::CircuitSpec spec, std::mt19937_64& init_rng)
    : layer_(std::move(spec)), dtheta_(layer_.params.size(), 0.0) {
    for (auto& p : layer_.params) p = rng::uniform(init_rng, -kPi, kPi);
}

Tensor QuantumFrontLayer::forward(const Tensor& x, bool) {
    const std::size_t m = static_cast<std::size_t>(layer_.spec.num_inputs);
    if (x.rank() != 2 || x.dim(1) != m) {
        throw std::invalid_argument("quantum layer expects (N, " + std::to_string(m) +
                                    "), got " + neural::shape_str(x.shape));
    }
    cached_x_ = x;
    have_input_ = true;
    const std::size_t n = x.batch();
    const std::size_t q = static_cast<std::size_t>(layer_.spec.num_qubits);
    Tensor y({n, q});
    for (std::size_t s = 0; s < n; ++s) {
        const auto e = qlayer::forward(layer_, {x.v.data() + s * m, m});
        std::copy(e.begin(), e.end(), y.v.begin() + s * q);
    }
    return y;
}

Tensor QuantumFrontLayer::backward(const Tensor& g) {
    if (!have_input_) throw std::logic_error("quantum layer: backward before forward");
    const std::size_t n = cached_x_.batch();
    const std::size_t m = static_cast<std::size_t>(layer_.spec.num_inputs);
    const std::size_t q = static_cast<std::size_t>(layer_.spec.num_qubits);
    if (g.rank() != 2 || g.batch() != n || g.dim(1) != q) {
        throw std::invalid_argument("quantum layer backward shape mismatch");
    }
    Tensor gin({n, m});
    for (std::size_t s = 0; s < n; ++s) {
        const auto back = qlayer::backward(layer_, {cached_x_.v.data() + s * m, m},
                                           {g.v.data() + s * q, q});
        for (std::size_t i = 0; i < dtheta_.size(); ++i) dtheta_[i] += back.d_params[i];
        std::copy(back.d_inputs.begin(), back.d_inputs.end(), gin.v.begin() + s * m);
    }
    return gin;
}

std::vector<neural::ParamRef> QuantumFrontLayer::params() {
    return {{"theta", {layer_.params.size()}, &layer_.params, &dtheta_}};
}

// ---------------------------------------------------------------- SplitModel

Tensor SplitModel::client_forward(const Tensor& x, bool training) {
    return client.forward(x, training);
}

Tensor SplitModel::server_forward(const Tensor& smashed, bool training) {
    if (smashed.rank() != 2 || smashed.dim(1) != cut_dim) {
        throw std::invalid_argument("smashed data must be (N, " + std::to_string(cut_dim) +
                                    "), got " + neural::shape_str(smashed.shape));
    }
    return server_rest.forward(front->forward(smashed, training), training);
}

Tensor SplitModel::centralized_forward(const Tensor& x, bool training) {
    return server_forward(client_forward(x, training), training);
}

Tensor SplitModel::server_backward(const Tensor& grad_out) {
    return front->backward(server_rest.backward(grad_out));
}

void SplitModel::client_backward(const Tensor& grad_smashed) {
    client.backward(grad_smashed);
}

std::vector<neural::ParamRef> SplitModel::client_params() { return client.params(); }

namespace {
void append(std::vector<neural::ParamRef>& out, std::vector<neural::ParamRef> in) {
    for (auto& r : in) out.push_back(std::move(r));
}
}  // namespace

std::vector<neural::ParamRef> SplitModel::server_params() {
    std::vector<neural::ParamRef> out = front->params();
    append(out, server_rest.params());
    return out;
}

std::vector<neural::ParamRef> SplitModel::all_params() {
    std::vector<neural::ParamRef> out = client_params();
    append(out, server_params());
    return out;
}

std::vector<neural::NamedTensor> SplitModel::state() {
    auto out = neural::snapshot(client, "client.");
    for (auto& t : neural::snapshot(*front, "front.")) out.push_back(std::move(t));
    for (auto& t : neural::snapshot(server_rest, "server.")) out.push_back(std::move(t));
    return out;
}

void SplitModel::load_state(const std::vector<neural::NamedTensor>& tensors) {
    neural::restore(client, tensors, "client.");
    neural::restore(*front, tensors, "front.");
    neural::restore(server_rest, tensors, "server.");
}

int SplitModel::predict_class(const Tensor& output, std::size_t row) const {
    const std::size_t width = output.dim(1);
    const double* p = output.v.data() + row * width;
    if (config.variant == 1) return p[0] >= 0.5 ? 1 : 0;
    std::size_t best = 0;
    for (std::size_t c = 1; c < width; ++c) {
        if (p[c] > p[best]) best = c;
    }
    return static_cast<int>(best);
}

// ---------------------------------------------------------------- builders

namespace {

std::unique_ptr<neural::Layer> make_front(const VariantConfig& config,
                                          std::mt19937_64& gen, std::size_t& cut_dim,
                                          std::size_t& front_out) {
    if (config.quantum_front) {
        auto spec = qlayer::build_catalog_circuit(config.circuit_id);
        cut_dim = static_cast<std::size_t>(spec.num_inputs);
        front_out = static_cast<std::size_t>(spec.num_qubits);
        auto front = std::make_unique<QuantumFrontLayer>(std::move(spec), gen);
        front->layer().mode = config.eval_mode;
        return front;
    }
    cut_dim = 3;
    front_out = 2;
    auto front = std::make_unique<neural::Sequential>();
    front->emplace<neural::Dense>(cut_dim, front_out, gen);
    front->emplace<neural::Relu>();
    return front;
}

}  // namespace

SplitModel build_variant1(const VariantConfig& config) {
    SplitModel m;
    m.config = config;
    m.loss_kind = neural::LossKind::BCE;
    std::mt19937_64 gen(rng::derive(config.seed, 0x5eed));

    std::size_t front_out = 2;
    m.front = make_front(config, gen, m.cut_dim, front_out);

    m.client.emplace<neural::Dense>(7, 32, gen).emplace<neural::Relu>();
    m.client.emplace<neural::Dense>(32, 16, gen).emplace<neural::Relu>();
    m.client.emplace<neural::Dense>(16, 8, gen).emplace<neural::Relu>();
    m.client.emplace<neural::Dense>(8, m.cut_dim, gen).emplace<neural::Relu>();

    m.server_rest.emplace<neural::Dense>(front_out, 16, gen).emplace<neural::Relu>();
    m.server_rest.emplace<neural::Dropout>(config.dropout_rate, rng::derive(config.seed, 1));
    m.server_rest.emplace<neural::Dense>(16, 16, gen).emplace<neural::Relu>();
    m.server_rest.emplace<neural::Dropout>(config.dropout_rate, rng::derive(config.seed, 2));
    m.server_rest.emplace<neural::Dense>(16, 8, gen).emplace<neural::Relu>();
    m.server_rest.emplace<neural::Dense>(8, 1, gen).emplace<neural::Sigmoid>();
    return m;
}

SplitModel build_variant2(const VariantConfig& config) {
    if (config.num_classes < 2) {
        throw std::invalid_argument("variant 2 needs num_classes >= 2");
    }
    SplitModel m;
    m.config = config;
    m.loss_kind = neural::LossKind::CrossEntropy;
    std::mt19937_64 gen(rng::derive(config.seed, 0x5eed));

    std::size_t front_out = 2;
    m.front = make_front(config, gen, m.cut_dim, front_out);

    m.client.emplace<neural::Conv2D>(1, 8, 3, 1, gen).emplace<neural::Relu>();
    m.client.emplace<neural::MaxPool2D>();
    m.client.emplace<neural::Conv2D>(8, 16, 3, 1, gen).emplace<neural::Relu>();
    m.client.emplace<neural::MaxPool2D>();
    m.client.emplace<neural::Flatten>();
    m.client.emplace<neural::Dense>(16 * 7 * 7, 64, gen).emplace<neural::Relu>();
    m.client.emplace<neural::Dense>(64, m.cut_dim, gen);

    const std::size_t n_out = static_cast<std::size_t>(config.num_classes);
    m.server_rest.emplace<neural::Dense>(front_out, 32, gen).emplace<neural::Relu>();
    m.server_rest.emplace<neural::Dense>(32, 16, gen).emplace<neural::Relu>();
    m.server_rest.emplace<neural::Dense>(16, n_out, gen);
    return m;
}

SplitModel build_variant(const VariantConfig& config) {
    switch (config.variant) {
        case 1: return build_variant1(config);
        case 2: return build_variant2(config);
        default: throw std::invalid_argument("variant must be 1 or 2");
    }
}

}  // namespace hqsl::models

#include "hqsl/qlayer/layer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hqsl::qlayer {

namespace {

constexpr double kHalfPi = 1.5707963267948966;

void check_sizes(const QuantumLayer& layer, std::span<const double> z) {
    if (z.size() != static_cast<std::size_t>(layer.spec.num_inputs)) {
        throw std::invalid_argument("expected " + std::to_string(layer.spec.num_inputs) +
                                    " circuit inputs, got " + std::to_string(z.size()));
    }
    if (layer.params.size() != static_cast<std::size_t>(layer.spec.num_params)) {
        throw std::invalid_argument("parameter vector size mismatch");
    }
}

std::vector<double> bind_angles(const CircuitSpec& spec, std::span<const double> params,
                                std::span<const double> z) {
    std::vector<double> angles(spec.gates.size(), 0.0);
    for (std::size_t i = 0; i < spec.gates.size(); ++i) {
        const auto& src = spec.gates[i].source;
        if (spec.gates[i].kind == qsim::GateKind::CZ) continue;
        switch (src.kind) {
            case AngleSource::Kind::Input:
                angles[i] = z[static_cast<std::size_t>(src.index)];
                break;
            case AngleSource::Kind::Param:
                angles[i] = params[static_cast<std::size_t>(src.index)];
                break;
            case AngleSource::Kind::Const:
                angles[i] = src.value;
                break;
        }
    }
    return angles;
}

std::vector<double> evaluate(const CircuitSpec& spec, std::span<const double> angles,
                             const qsim::EvalMode& mode) {
    auto state = qsim::init_state(spec.num_qubits);
    for (std::size_t i = 0; i < spec.gates.size(); ++i) {
        const auto& g = spec.gates[i];
        qsim::Gate gate{g.kind, g.target, g.control, angles[i]};
        state.apply(gate);
    }
    return qsim::expectation_vector(state, mode);
}

}  // namespace

std::vector<double> forward(const QuantumLayer& layer, std::span<const double> z) {
    check_sizes(layer, z);
    const auto angles = bind_angles(layer.spec, layer.params, z);
    return evaluate(layer.spec, angles, layer.mode);
}

std::vector<double> forward_noisy(const QuantumLayer& layer, std::span<const double> z,
                                  qsim::NoiseChannel& channel) {
    check_sizes(layer, z);
    const auto angles = bind_angles(layer.spec, layer.params, z);
    auto state = qsim::init_state(layer.spec.num_qubits);
    for (std::size_t i = 0; i < layer.spec.gates.size(); ++i) {
        const auto& g = layer.spec.gates[i];
        qsim::Gate gate{g.kind, g.target, g.control, angles[i]};
        state.apply_depolarizing(gate, channel);
    }
    return qsim::expectation_vector(state, layer.mode);
}

ShiftGrads parameter_shift(const QuantumLayer& layer, std::span<const double> z) {
    check_sizes(layer, z);
    const auto& spec = layer.spec;
    const std::size_t q = static_cast<std::size_t>(spec.num_qubits);

    ShiftGrads out;
    out.by_param = Jacobian(static_cast<std::size_t>(spec.num_params), q);
    out.by_input = Jacobian(static_cast<std::size_t>(spec.num_inputs), q);

    auto angles = bind_angles(spec, layer.params, z);
    for (std::size_t g = 0; g < spec.gates.size(); ++g) {
        const auto& src = spec.gates[g].source;
        if (spec.gates[g].kind == qsim::GateKind::CZ ||
            src.kind == AngleSource::Kind::Const) {
            continue;
        }
        const double base = angles[g];
        angles[g] = base + kHalfPi;
        const auto plus = evaluate(spec, angles, layer.mode);
        angles[g] = base - kHalfPi;
        const auto minus = evaluate(spec, angles, layer.mode);
        angles[g] = base;
        out.evaluations += 2;

        Jacobian& jac = src.kind == AngleSource::Kind::Param ? out.by_param : out.by_input;
        const std::size_t row = static_cast<std::size_t>(src.index);
        for (std::size_t c = 0; c < q; ++c) {
            jac.at(row, c) += 0.5 * (plus[c] - minus[c]);
        }
    }
    return out;
}

BackwardResult backward(const QuantumLayer& layer, std::span<const double> z,
                        std::span<const double> upstream) {
    if (upstream.size() != static_cast<std::size_t>(layer.spec.num_qubits)) {
        throw std::invalid_argument("upstream gradient size mismatch");
    }
    const auto grads = parameter_shift(layer, z);

    BackwardResult out;
    out.evaluations = grads.evaluations;
    out.d_params.assign(static_cast<std::size_t>(layer.spec.num_params), 0.0);
    out.d_inputs.assign(static_cast<std::size_t>(layer.spec.num_inputs), 0.0);
    for (std::size_t r = 0; r < out.d_params.size(); ++r) {
        for (std::size_t c = 0; c < upstream.size(); ++c) {
            out.d_params[r] += grads.by_param.at(r, c) * upstream[c];
        }
    }
    for (std::size_t r = 0; r < out.d_inputs.size(); ++r) {
        for (std::size_t c = 0; c < upstream.size(); ++c) {
            out.d_inputs[r] += grads.by_input.at(r, c) * upstream[c];
        }
    }
    return out;
}

}  // namespace hqsl::qlayer

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hqsl/qlayer/circuit.hpp"
#include "hqsl/qsim/state.hpp"

namespace hqsl::qlayer {

// A circuit plus its trainable rotation angles. Evaluation is pure given
// (spec, params, z); instances may be evaluated concurrently across samples.
struct QuantumLayer {
    CircuitSpec spec;
    std::vector<double> params;
    qsim::EvalMode mode = qsim::EvalMode::analytic();

    explicit QuantumLayer(CircuitSpec s)
        : spec(std::move(s)),
          params(static_cast<std::size_t>(spec.num_params), 0.0) {}
};

struct Jacobian {
    std::size_t rows = 0, cols = 0;
    std::vector<double> v;

    Jacobian() = default;
    Jacobian(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0.0) {}
    double& at(std::size_t r, std::size_t c) { return v[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
};

struct ShiftGrads {
    Jacobian by_param;  // num_params x num_qubits
    Jacobian by_input;  // num_inputs x num_qubits
    int evaluations = 0;
};

// Expectations of the circuit bound to (z, params): one value per qubit.
std::vector<double> forward(const QuantumLayer& layer, std::span<const double> z);

// Same forward pass but each gate passes through the depolarizing channel.
std::vector<double> forward_noisy(const QuantumLayer& layer, std::span<const double> z,
                                  qsim::NoiseChannel& channel);

// Two-point rule: every angle occurrence contributes
// (f(theta + pi/2) - f(theta - pi/2)) / 2 to the jacobian row of its source.
// An input bound at several loading points accumulates one term per
// occurrence, which is what makes the result exact for those circuits.
ShiftGrads parameter_shift(const QuantumLayer& layer, std::span<const double> z);

// Chain-rule contraction against an upstream d(loss)/d(expectations) vector.
struct BackwardResult {
    std::vector<double> d_params;
    std::vector<double> d_inputs;
    int evaluations = 0;
};
BackwardResult backward(const QuantumLayer& layer, std::span<const double> z,
                        std::span<const double> upstream);

}  // namespace hqsl::qlayer

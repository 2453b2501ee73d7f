#pragma once

#include <string>
#include <vector>

#include "hqsl/qsim/state.hpp"

namespace hqsl::qlayer {

// Where a gate angle comes from when the circuit is evaluated.
struct AngleSource {
    enum class Kind { Input, Param, Const };
    Kind kind = Kind::Const;
    int index = 0;       // Input / Param
    double value = 0.0;  // Const

    static AngleSource input(int j) { return {Kind::Input, j, 0.0}; }
    static AngleSource param(int i) { return {Kind::Param, i, 0.0}; }
    static AngleSource constant(double a) { return {Kind::Const, 0, a}; }
    static AngleSource none() { return constant(0.0); }
};

struct CircuitGate {
    qsim::GateKind kind;
    int target;
    int control = -1;  // CZ only
    AngleSource source = AngleSource::none();
};

// Immutable gate program. Rotation angles are bound from an input vector of
// length num_inputs and a parameter vector of length num_params at
// evaluation time.
struct CircuitSpec {
    int num_qubits = 0;
    int num_inputs = 0;
    int num_params = 0;
    std::vector<CircuitGate> gates;
};

// Throws std::invalid_argument if indices are out of range, CZ qubits
// coincide, or some input index is never loaded.
void validate(const CircuitSpec& spec);

// Longest dependency chain over qubits, each gate counting one step on every
// qubit it touches (a CZ synchronises both chains).
int depth(const CircuitSpec& spec);

// Published 2-qubit ladder layouts (ids 6, 7, 8), their 3-layer re-uploading
// variants (9, 10), and the earlier trial layouts (1..5).
CircuitSpec build_catalog_circuit(int id);

// Qubit-efficient loader: each qubit alternates an RX encoding of input k
// with a parameterised rotation (RZ on even blocks, RY on odd), with a CZ
// ladder between blocks and no trailing CZ. num_inputs = n ("loading
// points"), num_params = n * num_qubits. (2, 3) reproduces catalog id 6.
CircuitSpec build_qubit_efficient(int num_qubits, int num_loading_points);

// Text diagram, one row per qubit, inputs shown as x<j> and parameters as
// t<i>. CZ endpoints are drawn as '*' in a shared column.
std::string to_diagram(const CircuitSpec& spec);

}  // namespace hqsl::qlayer

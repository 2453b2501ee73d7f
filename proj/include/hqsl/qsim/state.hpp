#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace hqsl::qsim {

using cdouble = std::complex<double>;

inline constexpr int kMaxQubits = 16;

enum class GateKind { RX, RY, RZ, CZ };

// Rotation gates carry an angle and one target; CZ carries two distinct
// qubits and no angle. CZ is symmetric in (target, control).
struct Gate {
    GateKind kind;
    int target;
    int control = -1;   // CZ only
    double angle = 0.0; // rotations only

    static Gate rx(int q, double theta) { return {GateKind::RX, q, -1, theta}; }
    static Gate ry(int q, double theta) { return {GateKind::RY, q, -1, theta}; }
    static Gate rz(int q, double theta) { return {GateKind::RZ, q, -1, theta}; }
    static Gate cz(int a, int b) { return {GateKind::CZ, a, b, 0.0}; }
};

enum class Pauli { X, Y, Z };

// Stochastic depolarizing channel: after each gate, with probability p1
// (single-qubit gate) or p2 (two-qubit gate), a uniformly random Pauli is
// inserted on one affected qubit. Trajectory sampling keeps memory at 2^Q.
struct NoiseChannel {
    double p1 = 0.0;
    double p2 = 0.0;
    std::mt19937_64 rng;

    NoiseChannel(double p1_, double p2_, std::uint64_t seed)
        : p1(p1_), p2(p2_), rng(seed) {}
};

// Dense amplitude vector over the computational basis. Qubit 0 is the most
// significant bit of the amplitude index: for Q qubits, basis index
// b_0 b_1 ... b_{Q-1} reads left-to-right as qubit 0 .. qubit Q-1.
class StateVector {
public:
    explicit StateVector(int num_qubits);

    int num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return amps_.size(); }
    const std::vector<cdouble>& amplitudes() const { return amps_; }
    cdouble amplitude(std::size_t i) const { return amps_[i]; }

    void apply(const Gate& g);
    void apply_pauli(Pauli p, int qubit);

    // Applies the gate, then samples the channel for a Pauli insertion.
    void apply_depolarizing(const Gate& g, NoiseChannel& channel);

    // Exact <sigma_y> on one qubit (other qubits traced out by the bilinear form).
    double expectation_y(int qubit) const;

    double norm_sq() const;

private:
    void apply_1q(int qubit, cdouble u00, cdouble u01, cdouble u10, cdouble u11);
    void apply_cz(int a, int b);
    void check_qubit(int q) const;

    int num_qubits_;
    std::vector<cdouble> amps_;
};

StateVector init_state(int num_qubits);

// Shot-sampled estimate of expectation_y: (M_plus - M_minus) / shots with
// P(+1) = (1 + exact) / 2, i.i.d. per shot, deterministic for a fixed seed.
double sample_expectation_y(const StateVector& state, int qubit, int shots,
                            std::uint64_t seed);

struct EvalMode {
    enum class Kind { Analytic, Shots } kind = Kind::Analytic;
    int shots = 1000;
    std::uint64_t seed = 0;

    static EvalMode analytic() { return {}; }
    static EvalMode with_shots(int shots, std::uint64_t seed) {
        return {Kind::Shots, shots, seed};
    }
};

// One <sigma_y> per qubit, in qubit order. In shot mode, qubit q uses the
// derived seed rng::derive(mode.seed, q).
std::vector<double> expectation_vector(const StateVector& state, const EvalMode& mode);

}  // namespace hqsl::qsim

#include "hqsl/qsim/state.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hqsl/common/rng.hpp"

namespace hqsl::qsim {

namespace {
const cdouble kI(0.0, 1.0);
}

StateVector::StateVector(int num_qubits) : num_qubits_(num_qubits) {
    if (num_qubits < 1 || num_qubits > kMaxQubits) {
        throw std::invalid_argument("qubit count must be in [1, " +
                                    std::to_string(kMaxQubits) + "], got " +
                                    std::to_string(num_qubits));
    }
    amps_.assign(std::size_t{1} << num_qubits, cdouble{0.0, 0.0});
    amps_[0] = cdouble{1.0, 0.0};
}

StateVector init_state(int num_qubits) { return StateVector(num_qubits); }

void StateVector::check_qubit(int q) const {
    if (q < 0 || q >= num_qubits_) {
        throw std::out_of_range("qubit index " + std::to_string(q) +
                                " out of range for " + std::to_string(num_qubits_) +
                                " qubits");
    }
}

void StateVector::apply_1q(int qubit, cdouble u00, cdouble u01, cdouble u10,
                           cdouble u11) {
    // Qubit 0 is the MSB, so qubit q toggles bit (Q-1-q) of the index.
    const std::size_t stride = std::size_t{1} << (num_qubits_ - 1 - qubit);
    const std::size_t n = amps_.size();
    for (std::size_t base = 0; base < n; base += 2 * stride) {
        for (std::size_t off = 0; off < stride; ++off) {
            const std::size_t i0 = base + off;
            const std::size_t i1 = i0 + stride;
            const cdouble a0 = amps_[i0];
            const cdouble a1 = amps_[i1];
            amps_[i0] = u00 * a0 + u01 * a1;
            amps_[i1] = u10 * a0 + u11 * a1;
        }
    }
}

void StateVector::apply_cz(int a, int b) {
    const std::size_t ma = std::size_t{1} << (num_qubits_ - 1 - a);
    const std::size_t mb = std::size_t{1} << (num_qubits_ - 1 - b);
    const std::size_t n = amps_.size();
    for (std::size_t i = 0; i < n; ++i) {
        if ((i & ma) && (i & mb)) amps_[i] = -amps_[i];
    }
}

void StateVector::apply(const Gate& g) {
    check_qubit(g.target);
    switch (g.kind) {
        case GateKind::RX: {
            const double c = std::cos(g.angle / 2.0);
            const double s = std::sin(g.angle / 2.0);
            apply_1q(g.target, c, -kI * s, -kI * s, c);
            break;
        }
        case GateKind::RY: {
            const double c = std::cos(g.angle / 2.0);
            const double s = std::sin(g.angle / 2.0);
            apply_1q(g.target, c, -s, s, c);
            break;
        }
        case GateKind::RZ: {
            const cdouble em = std::exp(-kI * (g.angle / 2.0));
            const cdouble ep = std::exp(kI * (g.angle / 2.0));
            apply_1q(g.target, em, 0.0, 0.0, ep);
            break;
        }
        case GateKind::CZ: {
            check_qubit(g.control);
            if (g.control == g.target) {
                throw std::invalid_argument("CZ requires two distinct qubits");
            }
            apply_cz(g.target, g.control);
            break;
        }
    }
}

void StateVector::apply_pauli(Pauli p, int qubit) {
    check_qubit(qubit);
    switch (p) {
        case Pauli::X: apply_1q(qubit, 0.0, 1.0, 1.0, 0.0); break;
        case Pauli::Y: apply_1q(qubit, 0.0, -kI, kI, 0.0); break;
        case Pauli::Z: apply_1q(qubit, 1.0, 0.0, 0.0, -1.0); break;
    }
}

void StateVector::apply_depolarizing(const Gate& g, NoiseChannel& channel) {
    apply(g);
    const bool two_qubit = g.kind == GateKind::CZ;
    const double p = two_qubit ? channel.p2 : channel.p1;
    if (p <= 0.0) return;
    if (rng::uniform01(channel.rng) < p) {
        int q = g.target;
        if (two_qubit) {
            q = (channel.rng() & 1) ? g.target : g.control;
        }
        switch (channel.rng() % 3) {
            case 0: apply_pauli(Pauli::X, q); break;
            case 1: apply_pauli(Pauli::Y, q); break;
            default: apply_pauli(Pauli::Z, q); break;
        }
    }
}

double StateVector::expectation_y(int qubit) const {
    check_qubit(qubit);
    // <psi| sigma_y^(q) |psi> = 2 * sum over paired indices of Im(conj(a0) * a1).
    const std::size_t stride = std::size_t{1} << (num_qubits_ - 1 - qubit);
    const std::size_t n = amps_.size();
    double acc = 0.0;
    for (std::size_t base = 0; base < n; base += 2 * stride) {
        for (std::size_t off = 0; off < stride; ++off) {
            const std::size_t i0 = base + off;
            acc += std::imag(std::conj(amps_[i0]) * amps_[i0 + stride]);
        }
    }
    return 2.0 * acc;
}

double StateVector::norm_sq() const {
    double acc = 0.0;
    for (const auto& a : amps_) acc += std::norm(a);
    return acc;
}

double sample_expectation_y(const StateVector& state, int qubit, int shots,
                            std::uint64_t seed) {
    if (shots < 1) throw std::invalid_argument("shots must be >= 1");
    const double p_plus = 0.5 * (1.0 + state.expectation_y(qubit));
    std::mt19937_64 gen(seed);
    long plus = 0;
    for (int s = 0; s < shots; ++s) {
        if (rng::uniform01(gen) < p_plus) ++plus;
    }
    const long minus = shots - plus;
    return static_cast<double>(plus - minus) / static_cast<double>(shots);
}

std::vector<double> expectation_vector(const StateVector& state, const EvalMode& mode) {
    std::vector<double> out(static_cast<std::size_t>(state.num_qubits()));
    for (int q = 0; q < state.num_qubits(); ++q) {
        if (mode.kind == EvalMode::Kind::Analytic) {
            out[static_cast<std::size_t>(q)] = state.expectation_y(q);
        } else {
            out[static_cast<std::size_t>(q)] = sample_expectation_y(
                state, q, mode.shots, rng::derive(mode.seed, static_cast<std::uint64_t>(q)));
        }
    }
    return out;
}

}  // namespace hqsl::qsim

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "hqsl/common/rng.hpp"
#include "hqsl/qlayer/circuit.hpp"
#include "hqsl/qlayer/layer.hpp"

using namespace hqsl;
using qlayer::AngleSource;
using qlayer::CircuitSpec;
using qlayer::QuantumLayer;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Independent gradient oracle: central finite differences on the forward pass.
std::vector<double> fd_input_grad(const QuantumLayer& layer, std::vector<double> z,
                                  std::size_t j, std::size_t out, double h = 1e-5) {
    (void)out;
    std::vector<double> grad(static_cast<std::size_t>(layer.spec.num_qubits));
    z[j] += h;
    const auto plus = qlayer::forward(layer, z);
    z[j] -= 2 * h;
    const auto minus = qlayer::forward(layer, z);
    for (std::size_t c = 0; c < grad.size(); ++c) grad[c] = (plus[c] - minus[c]) / (2 * h);
    return grad;
}

std::vector<double> fd_param_grad(QuantumLayer layer, const std::vector<double>& z,
                                  std::size_t i, double h = 1e-5) {
    std::vector<double> grad(static_cast<std::size_t>(layer.spec.num_qubits));
    layer.params[i] += h;
    const auto plus = qlayer::forward(layer, z);
    layer.params[i] -= 2 * h;
    const auto minus = qlayer::forward(layer, z);
    for (std::size_t c = 0; c < grad.size(); ++c) grad[c] = (plus[c] - minus[c]) / (2 * h);
    return grad;
}

QuantumLayer random_layer(int circuit_id, std::mt19937_64& gen) {
    QuantumLayer layer(qlayer::build_catalog_circuit(circuit_id));
    for (auto& p : layer.params) p = rng::uniform(gen, -kPi, kPi);
    return layer;
}

std::vector<double> random_inputs(const CircuitSpec& spec, std::mt19937_64& gen) {
    std::vector<double> z(static_cast<std::size_t>(spec.num_inputs));
    for (auto& v : z) v = rng::uniform(gen, -kPi, kPi);
    return z;
}

}  // namespace

TEST_CASE("catalog resource accounting") {
    struct Row { int id, params, depth, inputs, qubits; };
    const Row expected[] = {
        {7, 6, 6, 3, 2}, {8, 6, 8, 3, 2}, {6, 6, 8, 3, 2},
        {9, 18, 20, 3, 2}, {10, 18, 18, 3, 2},
    };
    for (const auto& row : expected) {
        const auto spec = qlayer::build_catalog_circuit(row.id);
        CAPTURE(row.id);
        CHECK(spec.num_params == row.params);
        CHECK(qlayer::depth(spec) == row.depth);
        CHECK(spec.num_inputs == row.inputs);
        CHECK(spec.num_qubits == row.qubits);
    }
    for (int id = 1; id <= 10; ++id) {
        CHECK_NOTHROW(qlayer::validate(qlayer::build_catalog_circuit(id)));
    }
    CHECK_THROWS_AS(qlayer::build_catalog_circuit(0), std::invalid_argument);
    CHECK_THROWS_AS(qlayer::build_catalog_circuit(11), std::invalid_argument);
}

TEST_CASE("earlier trial circuits have the described shapes") {
    const auto c1 = qlayer::build_catalog_circuit(1);
    CHECK(c1.num_qubits == 2);
    CHECK(c1.num_inputs == 2);
    CHECK(c1.num_params == 6);

    const auto c2 = qlayer::build_catalog_circuit(2);
    CHECK(c2.num_qubits == 4);
    CHECK(c2.num_inputs == 4);

    const auto c3 = qlayer::build_catalog_circuit(3);
    CHECK(c3.num_qubits == 4);
    CHECK(c3.num_params == 12);

    const auto c4 = qlayer::build_catalog_circuit(4);
    int cz4 = 0;
    for (const auto& g : c4.gates) cz4 += g.kind == qsim::GateKind::CZ;
    CHECK(cz4 == 0);
    CHECK(qlayer::depth(c4) == 6);

    const auto c5 = qlayer::build_catalog_circuit(5);
    CHECK(c5.num_params == 8);
    CHECK(qlayer::depth(c5) == 8);
}

TEST_CASE("qubit-efficient generator") {
    SUBCASE("(2, 3) reproduces catalog circuit 6") {
        const auto gen = qlayer::build_qubit_efficient(2, 3);
        const auto cat = qlayer::build_catalog_circuit(6);
        REQUIRE(gen.gates.size() == cat.gates.size());
        CHECK(gen.num_params == cat.num_params);
        CHECK(gen.num_inputs == cat.num_inputs);
        for (std::size_t i = 0; i < gen.gates.size(); ++i) {
            CHECK(gen.gates[i].kind == cat.gates[i].kind);
            CHECK(gen.gates[i].target == cat.gates[i].target);
            CHECK(gen.gates[i].control == cat.gates[i].control);
            CHECK(gen.gates[i].source.kind == cat.gates[i].source.kind);
            CHECK(gen.gates[i].source.index == cat.gates[i].source.index);
        }
    }
    SUBCASE("(2, 6) doubles the parameter count") {
        const auto spec = qlayer::build_qubit_efficient(2, 6);
        CHECK(spec.num_params == 12);
        CHECK(spec.num_inputs == 6);
    }
    SUBCASE("single qubit has no entangler") {
        const auto spec = qlayer::build_qubit_efficient(1, 3);
        for (const auto& g : spec.gates) CHECK(g.kind != qsim::GateKind::CZ);
    }
}

TEST_CASE("forward evaluation") {
    SUBCASE("identity circuit on |00> measures zero") {
        QuantumLayer layer(qlayer::build_catalog_circuit(6));
        const std::vector<double> z{0.0, 0.0, 0.0};
        const auto e = qlayer::forward(layer, z);
        REQUIRE(e.size() == 2);
        CHECK(e[0] == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(e[1] == doctest::Approx(0.0).epsilon(1e-15));
    }
    SUBCASE("outputs stay in [-1, 1]") {
        std::mt19937_64 gen(17);
        auto layer = random_layer(6, gen);
        for (int t = 0; t < 50; ++t) {
            const auto e = qlayer::forward(layer, random_inputs(layer.spec, gen));
            for (double v : e) {
                CHECK(v >= -1.0 - 1e-12);
                CHECK(v <= 1.0 + 1e-12);
            }
        }
    }
    SUBCASE("dimension mismatch is rejected") {
        QuantumLayer layer(qlayer::build_catalog_circuit(6));
        const std::vector<double> z{0.0, 0.0};
        CHECK_THROWS_AS(qlayer::forward(layer, z), std::invalid_argument);
    }
}

TEST_CASE("every catalog circuit is invariant under a 2*pi input shift") {
    std::mt19937_64 gen(23);
    for (int id = 1; id <= 10; ++id) {
        auto layer = random_layer(id, gen);
        for (int t = 0; t < 10; ++t) {
            auto z = random_inputs(layer.spec, gen);
            const auto base = qlayer::forward(layer, z);
            for (std::size_t j = 0; j < z.size(); ++j) {
                auto shifted = z;
                shifted[j] += 2.0 * kPi;
                const auto moved = qlayer::forward(layer, shifted);
                for (std::size_t c = 0; c < base.size(); ++c) {
                    CHECK(std::abs(base[c] - moved[c]) < 1e-12);
                }
            }
        }
    }
}

TEST_CASE("parameter-shift gradients") {
    SUBCASE("single RX loading point reproduces -cos(z)") {
        CircuitSpec spec;
        spec.num_qubits = 1;
        spec.num_inputs = 1;
        spec.num_params = 0;
        spec.gates.push_back({qsim::GateKind::RX, 0, -1, AngleSource::input(0)});
        QuantumLayer layer(spec);
        const std::vector<double> z{0.0};
        const auto grads = qlayer::parameter_shift(layer, z);
        CHECK(grads.by_input.at(0, 0) == doctest::Approx(-1.0).epsilon(1e-12));
    }
    SUBCASE("matches finite differences on every catalog circuit") {
        std::mt19937_64 gen(31);
        for (int id = 1; id <= 10; ++id) {
            auto layer = random_layer(id, gen);
            for (int t = 0; t < 10; ++t) {
                const auto z = random_inputs(layer.spec, gen);
                const auto grads = qlayer::parameter_shift(layer, z);
                for (std::size_t i = 0; i < layer.params.size(); ++i) {
                    const auto fd = fd_param_grad(layer, z, i);
                    for (std::size_t c = 0; c < fd.size(); ++c) {
                        CHECK(std::abs(grads.by_param.at(i, c) - fd[c]) <= 1e-6);
                    }
                }
                for (std::size_t j = 0; j < z.size(); ++j) {
                    const auto fd = fd_input_grad(layer, z, j, 0);
                    for (std::size_t c = 0; c < fd.size(); ++c) {
                        CHECK(std::abs(grads.by_input.at(j, c) - fd[c]) <= 1e-6);
                    }
                }
            }
        }
    }
    SUBCASE("structurally disconnected parameter has zero gradient") {
        // With all angles zero the register stays |00>, so the other qubit's
        // phase parameter cannot reach output 0.
        QuantumLayer layer(qlayer::build_catalog_circuit(6));
        const std::vector<double> z{0.0, 0.0, 0.0};
        const auto grads = qlayer::parameter_shift(layer, z);
        CHECK(std::abs(grads.by_param.at(5, 0)) < 1e-14);
    }
    SUBCASE("evaluation count is twice the bound-angle occurrence count") {
        std::mt19937_64 gen(37);
        auto circuit6 = random_layer(6, gen);
        const auto g6 = qlayer::parameter_shift(circuit6, random_inputs(circuit6.spec, gen));
        CHECK(g6.evaluations == 2 * (6 + 6));  // 6 param + 6 input occurrences

        // Single-upload layout: occurrences equal source counts, so the count
        // reduces to 2 * (num_params + num_inputs).
        auto circuit3 = random_layer(3, gen);
        const auto g3 = qlayer::parameter_shift(circuit3, random_inputs(circuit3.spec, gen));
        CHECK(g3.evaluations == 2 * (circuit3.spec.num_params + circuit3.spec.num_inputs));
    }
    SUBCASE("backward contracts the jacobian") {
        std::mt19937_64 gen(41);
        auto layer = random_layer(6, gen);
        const auto z = random_inputs(layer.spec, gen);
        const std::vector<double> upstream{0.25, -1.5};
        const auto grads = qlayer::parameter_shift(layer, z);
        const auto back = qlayer::backward(layer, z, upstream);
        for (std::size_t i = 0; i < back.d_params.size(); ++i) {
            double want = 0.0;
            for (std::size_t c = 0; c < upstream.size(); ++c) {
                want += grads.by_param.at(i, c) * upstream[c];
            }
            CHECK(back.d_params[i] == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("diagram renders one row per qubit") {
    const auto spec = qlayer::build_catalog_circuit(6);
    const auto text = qlayer::to_diagram(spec);
    CHECK(text.find("q0:") != std::string::npos);
    CHECK(text.find("q1:") != std::string::npos);
    CHECK(text.find("RX(x0)") != std::string::npos);
    CHECK(text.find("t5") != std::string::npos);
    CHECK(text.find('*') != std::string::npos);
}

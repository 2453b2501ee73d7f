#include "hqsl/qlayer/circuit.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace hqsl::qlayer {

namespace {

using qsim::GateKind;

CircuitGate rot(GateKind k, int q, AngleSource src) { return {k, q, -1, src}; }
CircuitGate cz(int a, int b) { return {GateKind::CZ, a, b, AngleSource::none()}; }

// Parameterised rotation kind per block, cycling Z, Y, Z, Y, ...
GateKind block_kind(int block) { return (block % 2 == 0) ? GateKind::RZ : GateKind::RY; }

void append_cz_ladder(CircuitSpec& spec) {
    for (int q = 0; q + 1 < spec.num_qubits; ++q) spec.gates.push_back(cz(q, q + 1));
}

// One feature per qubit, re-uploaded `blocks` times through RX loading
// points, each followed by a parameterised rotation; optional CZ ladder
// between blocks (used by circuits 1, 2, 4, 5).
CircuitSpec per_qubit_loader(int qubits, int blocks, bool entangle) {
    CircuitSpec spec;
    spec.num_qubits = qubits;
    spec.num_inputs = qubits;
    spec.num_params = blocks * qubits;
    for (int k = 0; k < blocks; ++k) {
        for (int q = 0; q < qubits; ++q) {
            spec.gates.push_back(rot(GateKind::RX, q, AngleSource::input(q)));
        }
        for (int q = 0; q < qubits; ++q) {
            spec.gates.push_back(rot(block_kind(k), q, AngleSource::param(k * qubits + q)));
        }
        if (entangle && k + 1 < blocks) append_cz_ladder(spec);
    }
    return spec;
}

// A single Z-Y-Z triple, angles taken from the given sources.
void append_zyz(CircuitSpec& spec, int q, AngleSource a1, AngleSource a2, AngleSource a3) {
    spec.gates.push_back(rot(GateKind::RZ, q, a1));
    spec.gates.push_back(rot(GateKind::RY, q, a2));
    spec.gates.push_back(rot(GateKind::RZ, q, a3));
}

// Z-Y-Z encoding of the 3-dim input followed by a Z-Y-Z parameterised
// triple, repeated `layers` times per qubit; CZ between layers when
// entangled (circuits 7, 9, 10).
CircuitSpec reuploading(int layers, bool entangle) {
    CircuitSpec spec;
    spec.num_qubits = 2;
    spec.num_inputs = 3;
    spec.num_params = 6 * layers;
    for (int layer = 0; layer < layers; ++layer) {
        for (int q = 0; q < 2; ++q) {
            append_zyz(spec, q, AngleSource::input(0), AngleSource::input(1),
                       AngleSource::input(2));
            const int base = 6 * layer + 3 * q;
            append_zyz(spec, q, AngleSource::param(base), AngleSource::param(base + 1),
                       AngleSource::param(base + 2));
        }
        if (entangle && layer + 1 < layers) spec.gates.push_back(cz(0, 1));
    }
    return spec;
}

// Like the qubit-efficient ladder but the encoding gate of each block uses
// the same rotation axis as the block's parameterised gate (circuit 8).
CircuitSpec interleaved_same_axis() {
    CircuitSpec spec;
    spec.num_qubits = 2;
    spec.num_inputs = 3;
    spec.num_params = 6;
    for (int k = 0; k < 3; ++k) {
        const GateKind kind = block_kind(k);
        for (int q = 0; q < 2; ++q) spec.gates.push_back(rot(kind, q, AngleSource::input(k)));
        for (int q = 0; q < 2; ++q) {
            spec.gates.push_back(rot(kind, q, AngleSource::param(2 * k + q)));
        }
        if (k < 2) spec.gates.push_back(cz(0, 1));
    }
    return spec;
}

// Single RX upload per feature onto its own qubit, one Z-Y-Z parameterised
// triple per qubit, then a circular CZ closure (circuit 3).
CircuitSpec single_upload_vqc() {
    CircuitSpec spec;
    spec.num_qubits = 4;
    spec.num_inputs = 4;
    spec.num_params = 12;
    for (int q = 0; q < 4; ++q) {
        spec.gates.push_back(rot(GateKind::RX, q, AngleSource::input(q)));
    }
    for (int q = 0; q < 4; ++q) {
        append_zyz(spec, q, AngleSource::param(3 * q), AngleSource::param(3 * q + 1),
                   AngleSource::param(3 * q + 2));
    }
    for (int q = 0; q < 4; ++q) spec.gates.push_back(cz(q, (q + 1) % 4));
    return spec;
}

}  // namespace

void validate(const CircuitSpec& spec) {
    if (spec.num_qubits < 1 || spec.num_qubits > qsim::kMaxQubits) {
        throw std::invalid_argument("circuit qubit count out of range");
    }
    std::vector<bool> input_seen(static_cast<std::size_t>(spec.num_inputs), false);
    for (const auto& g : spec.gates) {
        if (g.target < 0 || g.target >= spec.num_qubits) {
            throw std::invalid_argument("gate target out of range");
        }
        if (g.kind == qsim::GateKind::CZ) {
            if (g.control < 0 || g.control >= spec.num_qubits || g.control == g.target) {
                throw std::invalid_argument("CZ requires two distinct in-range qubits");
            }
            continue;
        }
        switch (g.source.kind) {
            case AngleSource::Kind::Input:
                if (g.source.index < 0 || g.source.index >= spec.num_inputs) {
                    throw std::invalid_argument("input index out of range");
                }
                input_seen[static_cast<std::size_t>(g.source.index)] = true;
                break;
            case AngleSource::Kind::Param:
                if (g.source.index < 0 || g.source.index >= spec.num_params) {
                    throw std::invalid_argument("parameter index out of range");
                }
                break;
            case AngleSource::Kind::Const:
                break;
        }
    }
    for (int j = 0; j < spec.num_inputs; ++j) {
        if (!input_seen[static_cast<std::size_t>(j)]) {
            throw std::invalid_argument("input " + std::to_string(j) + " is never loaded");
        }
    }
}

int depth(const CircuitSpec& spec) {
    std::vector<int> chain(static_cast<std::size_t>(spec.num_qubits), 0);
    for (const auto& g : spec.gates) {
        if (g.kind == qsim::GateKind::CZ) {
            const int d = std::max(chain[static_cast<std::size_t>(g.target)],
                                   chain[static_cast<std::size_t>(g.control)]) + 1;
            chain[static_cast<std::size_t>(g.target)] = d;
            chain[static_cast<std::size_t>(g.control)] = d;
        } else {
            ++chain[static_cast<std::size_t>(g.target)];
        }
    }
    return chain.empty() ? 0 : *std::max_element(chain.begin(), chain.end());
}

CircuitSpec build_catalog_circuit(int id) {
    CircuitSpec spec;
    switch (id) {
        case 1: spec = per_qubit_loader(2, 3, true); break;
        case 2: spec = per_qubit_loader(4, 3, true); break;
        case 3: spec = single_upload_vqc(); break;
        case 4: spec = per_qubit_loader(2, 3, false); break;
        case 5: spec = per_qubit_loader(2, 4, false); break;
        case 6: spec = build_qubit_efficient(2, 3); break;
        case 7: spec = reuploading(1, false); break;
        case 8: spec = interleaved_same_axis(); break;
        case 9: spec = reuploading(3, true); break;
        case 10: spec = reuploading(3, false); break;
        default:
            throw std::invalid_argument("unknown catalog circuit id " + std::to_string(id));
    }
    validate(spec);
    return spec;
}

CircuitSpec build_qubit_efficient(int num_qubits, int num_loading_points) {
    if (num_qubits < 1 || num_loading_points < 1) {
        throw std::invalid_argument("qubit-efficient circuit needs >= 1 qubit and loading point");
    }
    CircuitSpec spec;
    spec.num_qubits = num_qubits;
    spec.num_inputs = num_loading_points;
    spec.num_params = num_loading_points * num_qubits;
    for (int k = 0; k < num_loading_points; ++k) {
        for (int q = 0; q < num_qubits; ++q) {
            spec.gates.push_back(rot(GateKind::RX, q, AngleSource::input(k)));
        }
        for (int q = 0; q < num_qubits; ++q) {
            spec.gates.push_back(rot(block_kind(k), q, AngleSource::param(k * num_qubits + q)));
        }
        if (k + 1 < num_loading_points) append_cz_ladder(spec);
    }
    validate(spec);
    return spec;
}

std::string to_diagram(const CircuitSpec& spec) {
    const char* names[] = {"RX", "RY", "RZ"};
    std::vector<int> chain(static_cast<std::size_t>(spec.num_qubits), 0);
    std::vector<std::vector<std::string>> cells(
        static_cast<std::size_t>(spec.num_qubits));

    auto place = [&](int q, int col, std::string label) {
        auto& row = cells[static_cast<std::size_t>(q)];
        row.resize(std::max(row.size(), static_cast<std::size_t>(col + 1)));
        row[static_cast<std::size_t>(col)] = std::move(label);
    };

    for (const auto& g : spec.gates) {
        if (g.kind == qsim::GateKind::CZ) {
            const int col = std::max(chain[static_cast<std::size_t>(g.target)],
                                     chain[static_cast<std::size_t>(g.control)]);
            place(g.target, col, "*");
            place(g.control, col, "*");
            chain[static_cast<std::size_t>(g.target)] = col + 1;
            chain[static_cast<std::size_t>(g.control)] = col + 1;
            continue;
        }
        std::string label = names[static_cast<int>(g.kind)];
        char buf[32];
        switch (g.source.kind) {
            case AngleSource::Kind::Input:
                std::snprintf(buf, sizeof(buf), "(x%d)", g.source.index);
                break;
            case AngleSource::Kind::Param:
                std::snprintf(buf, sizeof(buf), "(t%d)", g.source.index);
                break;
            case AngleSource::Kind::Const:
                std::snprintf(buf, sizeof(buf), "(%.3g)", g.source.value);
                break;
        }
        label += buf;
        const int col = chain[static_cast<std::size_t>(g.target)];
        place(g.target, col, label);
        chain[static_cast<std::size_t>(g.target)] = col + 1;
    }

    std::size_t cols = 0;
    for (const auto& row : cells) cols = std::max(cols, row.size());
    std::vector<std::size_t> width(cols, 1);
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            width[c] = std::max(width[c], row[c].size());
        }
    }

    std::string out;
    for (int q = 0; q < spec.num_qubits; ++q) {
        out += "q" + std::to_string(q) + ": ";
        const auto& row = cells[static_cast<std::size_t>(q)];
        for (std::size_t c = 0; c < cols; ++c) {
            std::string cell = c < row.size() ? row[c] : "";
            cell.resize(width[c], '-');
            out += "-" + cell;
        }
        out += "-\n";
    }
    return out;
}

}  // namespace hqsl::qlayer

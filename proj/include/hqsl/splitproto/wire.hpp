#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "hqsl/neural/tensor.hpp"

namespace hqsl::splitproto {

class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class MsgType : std::uint8_t {
    SmashedBatch = 0,
    LabelBatch = 1,
    GradientBatch = 2,
    WeightHandoff = 3,
    Control = 4,
    Prediction = 5,
};

enum class ControlOp : std::uint8_t {
    BeginEpoch = 0,
    EndEpoch = 1,
    Done = 2,
};

// Framed binary message. Frame: magic "HQSL", version byte (1), type byte,
// 4-byte little-endian payload length, payload. Tensor payloads carry a
// 1-byte rank, rank 4-byte dims, then little-endian float64 data; Control
// payloads are a single opcode byte.
struct WireMessage {
    MsgType type = MsgType::Control;
    neural::Tensor tensor;
    ControlOp control = ControlOp::Done;

    static WireMessage data(MsgType type, neural::Tensor t) {
        WireMessage m;
        m.type = type;
        m.tensor = std::move(t);
        return m;
    }
    static WireMessage ctrl(ControlOp op) {
        WireMessage m;
        m.type = MsgType::Control;
        m.control = op;
        return m;
    }
};

inline constexpr std::size_t kFrameHeaderSize = 10;
inline constexpr std::uint8_t kWireVersion = 1;

std::vector<std::uint8_t> encode(const WireMessage& msg);

// Decodes one full frame; throws ProtocolError on bad magic, version, type,
// or length mismatches.
WireMessage decode(std::span<const std::uint8_t> frame);

// Payload length parsed from a frame header (magic/version checked).
std::size_t payload_length(std::span<const std::uint8_t> header);

}  // namespace hqsl::splitproto

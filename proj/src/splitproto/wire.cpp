#include "hqsl/splitproto/wire.hpp"

#include <cstring>

namespace hqsl::splitproto {

namespace {

const char kMagic[4] = {'H', 'Q', 'S', 'L'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 24));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
    return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
           (static_cast<std::uint32_t>(b[at + 2]) << 16) |
           (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

void put_f64(std::vector<std::uint8_t>& out, double d) {
    std::uint64_t u;
    std::memcpy(&u, &d, 8);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
}

double get_f64(std::span<const std::uint8_t> b, std::size_t at) {
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[at + i]) << (8 * i);
    double d;
    std::memcpy(&d, &u, 8);
    return d;
}

}  // namespace

std::vector<std::uint8_t> encode(const WireMessage& msg) {
    std::vector<std::uint8_t> payload;
    if (msg.type == MsgType::Control) {
        payload.push_back(static_cast<std::uint8_t>(msg.control));
    } else {
        const auto& t = msg.tensor;
        if (t.rank() == 0 || t.rank() > 255) throw ProtocolError("tensor rank unsupported");
        payload.push_back(static_cast<std::uint8_t>(t.rank()));
        for (std::size_t d : t.shape) put_u32(payload, static_cast<std::uint32_t>(d));
        payload.reserve(payload.size() + 8 * t.size());
        for (double v : t.v) put_f64(payload, v);
    }

    std::vector<std::uint8_t> frame;
    frame.reserve(kFrameHeaderSize + payload.size());
    frame.insert(frame.end(), kMagic, kMagic + 4);
    frame.push_back(kWireVersion);
    frame.push_back(static_cast<std::uint8_t>(msg.type));
    put_u32(frame, static_cast<std::uint32_t>(payload.size()));
    frame.insert(frame.end(), payload.begin(), payload.end());
    return frame;
}

std::size_t payload_length(std::span<const std::uint8_t> header) {
    if (header.size() < kFrameHeaderSize) throw ProtocolError("short frame header");
    if (std::memcmp(header.data(), kMagic, 4) != 0) throw ProtocolError("bad frame magic");
    if (header[4] != kWireVersion) {
        throw ProtocolError("unsupported protocol version " + std::to_string(header[4]));
    }
    return get_u32(header, 6);
}

WireMessage decode(std::span<const std::uint8_t> frame) {
    const std::size_t payload_len = payload_length(frame);
    if (frame.size() != kFrameHeaderSize + payload_len) {
        throw ProtocolError("frame length mismatch");
    }
    const std::uint8_t type_byte = frame[5];
    if (type_byte > static_cast<std::uint8_t>(MsgType::Prediction)) {
        throw ProtocolError("unknown message type " + std::to_string(type_byte));
    }
    WireMessage msg;
    msg.type = static_cast<MsgType>(type_byte);
    const auto payload = frame.subspan(kFrameHeaderSize);

    if (msg.type == MsgType::Control) {
        if (payload.size() != 1) throw ProtocolError("control payload must be one byte");
        if (payload[0] > static_cast<std::uint8_t>(ControlOp::Done)) {
            throw ProtocolError("unknown control opcode");
        }
        msg.control = static_cast<ControlOp>(payload[0]);
        return msg;
    }

    if (payload.empty()) throw ProtocolError("empty tensor payload");
    const std::size_t rank = payload[0];
    if (payload.size() < 1 + 4 * rank) throw ProtocolError("tensor header truncated");
    neural::Shape shape(rank);
    for (std::size_t i = 0; i < rank; ++i) shape[i] = get_u32(payload, 1 + 4 * i);
    const std::size_t count = neural::numel(shape);
    const std::size_t expect = 1 + 4 * rank + 8 * count;
    if (payload.size() != expect) throw ProtocolError("tensor payload length mismatch");
    msg.tensor = neural::Tensor(shape);
    for (std::size_t i = 0; i < count; ++i) {
        msg.tensor[i] = get_f64(payload, 1 + 4 * rank + 8 * i);
    }
    return msg;
}

}  // namespace hqsl::splitproto

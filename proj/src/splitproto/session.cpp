#include "hqsl/splitproto/session.hpp"

#include <cmath>

#include "hqsl/models/metrics.hpp"

namespace hqsl::splitproto {

using neural::Tensor;

neural::Tensor pack_client_weights(models::SplitModel& model) {
    std::size_t total = 0;
    const auto params = model.client_params();
    for (const auto& p : params) total += p.value->size();
    Tensor packed({total});
    std::size_t at = 0;
    for (const auto& p : params) {
        std::copy(p.value->begin(), p.value->end(), packed.v.begin() + at);
        at += p.value->size();
    }
    return packed;
}

void unpack_client_weights(models::SplitModel& model, const Tensor& packed) {
    const auto params = model.client_params();
    std::size_t total = 0;
    for (const auto& p : params) total += p.value->size();
    if (packed.rank() != 1 || packed.size() != total) {
        throw ProtocolError("weight handoff size mismatch: got " +
                            std::to_string(packed.size()) + ", expected " +
                            std::to_string(total));
    }
    std::size_t at = 0;
    for (const auto& p : params) {
        std::copy_n(packed.v.begin() + at, p.value->size(), p.value->begin());
        at += p.value->size();
    }
}

// ---------------------------------------------------------------- server

ServerSession::ServerSession(models::SplitModel& model, double lr)
    : model_(model), optimizer_(lr) {}

std::vector<WireMessage> ServerSession::train_step(const Tensor& labels) {
    if (!pending_smashed_) throw ProtocolError("labels received without smashed data");
    const Tensor smashed = std::move(*pending_smashed_);
    pending_smashed_.reset();
    if (labels.size() != smashed.batch()) {
        throw ProtocolError("label batch does not match smashed batch");
    }
    std::vector<int> y(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        y[i] = static_cast<int>(std::llround(labels[i]));
    }
    const Tensor out = model_.server_forward(smashed, true);
    const auto l = neural::loss(model_.loss_kind, out, models::label_tensor(model_, y));
    const Tensor d_smashed = model_.server_backward(l.grad);
    optimizer_.step(model_.server_params());
    return {WireMessage::data(MsgType::GradientBatch, d_smashed)};
}

std::vector<WireMessage> ServerSession::handle(const WireMessage& msg) {
    switch (msg.type) {
        case MsgType::Control:
            switch (msg.control) {
                case ControlOp::BeginEpoch:
                    if (in_epoch_) throw ProtocolError("epoch already open");
                    in_epoch_ = true;
                    return {};
                case ControlOp::EndEpoch:
                    if (!in_epoch_) throw ProtocolError("no epoch open");
                    if (pending_smashed_) throw ProtocolError("epoch ended mid-batch");
                    in_epoch_ = false;
                    return {};
                case ControlOp::Done:
                    done_ = true;
                    return {};
            }
            throw ProtocolError("unknown control opcode");
        case MsgType::SmashedBatch:
            if (!in_epoch_) {
                // inference request
                return {WireMessage::data(MsgType::Prediction,
                                          model_.server_forward(msg.tensor, false))};
            }
            if (pending_smashed_) throw ProtocolError("two smashed batches in a row");
            pending_smashed_ = msg.tensor;
            return {};
        case MsgType::LabelBatch:
            if (!in_epoch_) throw ProtocolError("labels outside an epoch");
            return train_step(msg.tensor);
        case MsgType::WeightHandoff:
            if (pending_smashed_) throw ProtocolError("handoff mid-batch");
            unpack_client_weights(model_, msg.tensor);
            return {};
        case MsgType::GradientBatch:
        case MsgType::Prediction:
            break;
    }
    throw ProtocolError("unexpected message type at the server");
}

void serve_until_done(Channel& channel, ServerSession& session) {
    while (!session.done()) {
        const auto replies = session.handle(channel.recv());
        for (const auto& r : replies) channel.send(r);
    }
}

// ---------------------------------------------------------------- client

ClientSession::ClientSession(models::SplitModel& model, double lr)
    : model_(model), optimizer_(lr) {}

void ClientSession::run_local_epoch(Channel& channel, const Tensor& features,
                                    const std::vector<int>& labels, std::size_t batch_size,
                                    std::mt19937_64& shuffle_rng) {
    const std::size_t n = labels.size();
    if (n == 0) throw std::invalid_argument("empty shard");
    if (batch_size == 0) throw std::invalid_argument("batch size must be >= 1");

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[shuffle_rng() % i]);

    const std::size_t stride = features.per_sample();
    channel.send(WireMessage::ctrl(ControlOp::BeginEpoch));
    for (std::size_t start = 0; start < n; start += batch_size) {
        const std::size_t count = std::min(batch_size, n - start);
        neural::Shape shape = features.shape;
        shape[0] = count;
        Tensor x(shape);
        Tensor y({count});
        for (std::size_t r = 0; r < count; ++r) {
            const std::size_t src = order[start + r];
            std::copy_n(features.v.begin() + src * stride, stride,
                        x.v.begin() + r * stride);
            y[r] = static_cast<double>(labels[src]);
        }
        const Tensor smashed = model_.client_forward(x, true);
        channel.send(WireMessage::data(MsgType::SmashedBatch, smashed));
        channel.send(WireMessage::data(MsgType::LabelBatch, y));
        const WireMessage reply = channel.recv();
        if (reply.type != MsgType::GradientBatch) {
            throw ProtocolError("expected a gradient batch from the server");
        }
        model_.client_backward(reply.tensor);
        optimizer_.step(model_.client_params());
    }
    channel.send(WireMessage::ctrl(ControlOp::EndEpoch));
    channel.send(WireMessage::data(MsgType::WeightHandoff, pack_client_weights(model_)));
}

Tensor ClientSession::remote_predict(Channel& channel, const Tensor& features) {
    const Tensor smashed = model_.client_forward(features, false);
    channel.send(WireMessage::data(MsgType::SmashedBatch, smashed));
    const WireMessage reply = channel.recv();
    if (reply.type != MsgType::Prediction) {
        throw ProtocolError("expected a prediction from the server");
    }
    return reply.tensor;
}

void ClientSession::finish(Channel& channel) {
    channel.send(WireMessage::ctrl(ControlOp::Done));
}

}  // namespace hqsl::splitproto

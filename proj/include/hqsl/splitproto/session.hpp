#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "hqsl/models/split_model.hpp"
#include "hqsl/neural/optim.hpp"
#include "hqsl/splitproto/transport.hpp"
#include "hqsl/splitproto/wire.hpp"

namespace hqsl::splitproto {

// Flattened client parameters in canonical order, as carried by
// WeightHandoff messages.
neural::Tensor pack_client_weights(models::SplitModel& model);
void unpack_client_weights(models::SplitModel& model, const neural::Tensor& packed);

// Server half of the protocol. Between BeginEpoch and EndEpoch a
// SmashedBatch/LabelBatch pair triggers one training step and a
// GradientBatch reply; outside an epoch a SmashedBatch is an inference
// request answered with a Prediction. WeightHandoff payloads are stored in
// the model's client stack so the server always holds a complete model.
class ServerSession {
public:
    ServerSession(models::SplitModel& model, double lr);

    std::vector<WireMessage> handle(const WireMessage& msg);
    bool done() const { return done_; }

private:
    std::vector<WireMessage> train_step(const neural::Tensor& labels);

    models::SplitModel& model_;
    neural::Adam optimizer_;
    bool in_epoch_ = false;
    bool done_ = false;
    std::optional<neural::Tensor> pending_smashed_;
};

// Pumps a channel until the peer sends Done. Used by the tcp server role.
void serve_until_done(Channel& channel, ServerSession& session);

// Client half: drives local epochs and inference exchanges over a channel.
class ClientSession {
public:
    ClientSession(models::SplitModel& model, double lr);

    // One pass over the shard in shuffled mini-batches; sends the weight
    // handoff at the end of the epoch.
    void run_local_epoch(Channel& channel, const neural::Tensor& features,
                         const std::vector<int>& labels, std::size_t batch_size,
                         std::mt19937_64& shuffle_rng);

    // Outside-of-epoch exchange: smashed data out, server output back.
    neural::Tensor remote_predict(Channel& channel, const neural::Tensor& features);

    void finish(Channel& channel);  // Control(Done)

private:
    models::SplitModel& model_;
    neural::Adam optimizer_;
};

}  // namespace hqsl::splitproto

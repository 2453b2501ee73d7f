#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hqsl/dataio/dataset.hpp"
#include "hqsl/defense/laplace.hpp"
#include "hqsl/models/metrics.hpp"
#include "hqsl/models/split_model.hpp"
#include "hqsl/splitproto/session.hpp"

namespace hqsl::splitproto {

struct TrainPlan {
    int clients = 1;
    int global_epochs = 1;
    double lr = 1e-3;
    std::size_t batch_size = 32;
    std::uint64_t seed = 42;
    models::VariantConfig variant;
};

struct EpochMetric {
    int epoch = 0;   // 1-based global epoch
    int client = 0;  // client served
    double loss = 0.0;
    double accuracy = 0.0;
    double f1 = 0.0;
};

struct TrainResult {
    models::SplitModel model;
    std::vector<EpochMetric> metrics;
};

using MessageObserver = std::function<void(const WireMessage&, bool outbound)>;

// Round-robin training over an in-process loopback channel. Per global epoch
// every client runs one local epoch and hands its weights to the next client
// through the server; held-out metrics (against `test`, or the client's own
// shard when absent) are collected through the protocol's inference exchange.
TrainResult train_multi(const TrainPlan& plan, const std::vector<dataio::Dataset>& shards,
                        const dataio::Dataset* test, MessageObserver observer = nullptr);

// Single-client reduction of train_multi.
TrainResult train_single(const TrainPlan& plan, const dataio::Dataset& train,
                         const dataio::Dataset* test, MessageObserver observer = nullptr);

// The same client-side trajectory over an arbitrary channel (tcp role). The
// server must be running serve_until_done at the other end with a model built
// from the same variant config.
std::vector<EpochMetric> run_client_over_channel(const TrainPlan& plan, Channel& channel,
                                                 models::SplitModel& model,
                                                 const std::vector<dataio::Dataset>& shards,
                                                 const dataio::Dataset* test);

// Stratified IID shards: disjoint, covering, sizes within one of each other.
std::vector<dataio::Dataset> shard_iid(const dataio::Dataset& dataset, std::size_t k,
                                       std::uint64_t seed);

enum class InferMode { Classification, Attack };

// Defended inference. Classification routes the (optionally perturbed)
// smashed data through the server stack; attack mode returns the perturbed
// smashed data itself, which is all an adversary ever sees.
neural::Tensor infer(models::SplitModel& model, const neural::Tensor& x, InferMode mode,
                     const std::optional<defense::LaplaceNoiseConfig>& defense);

// Depolarizing-channel evaluation: expectation values are averaged over a
// fixed number of sampled Pauli trajectories per input. Ignored for a
// classical front (there is no circuit to perturb).
struct NoisyChannelConfig {
    double p1 = 0.0;
    double p2 = 0.0;
    int trajectories = 16;
    std::uint64_t seed = 0;
};

models::EvalMetrics evaluate_model(models::SplitModel& model, const dataio::Dataset& data,
                                   const std::optional<defense::LaplaceNoiseConfig>& defense,
                                   const std::optional<NoisyChannelConfig>& noise);

}  // namespace hqsl::splitproto

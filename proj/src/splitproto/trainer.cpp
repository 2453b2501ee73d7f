#include "hqsl/splitproto/trainer.hpp"

#include <iostream>

#include "hqsl/common/rng.hpp"

namespace hqsl::splitproto {

using neural::Tensor;

namespace {

EpochMetric metrics_from_prediction(models::SplitModel& model, const Tensor& prediction,
                                    const std::vector<int>& labels, int class_count) {
    EpochMetric m;
    m.loss = neural::loss(model.loss_kind, prediction,
                          models::label_tensor(model, labels)).value;
    std::vector<int> pred(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        pred[i] = model.predict_class(prediction, i);
    }
    m.accuracy = models::accuracy_score(pred, labels);
    m.f1 = models::f1_score(pred, labels, class_count);
    return m;
}

}  // namespace

std::vector<EpochMetric> run_client_over_channel(const TrainPlan& plan, Channel& channel,
                                                 models::SplitModel& model,
                                                 const std::vector<dataio::Dataset>& shards,
                                                 const dataio::Dataset* test) {
    if (shards.empty()) throw std::invalid_argument("no client shards");
    ClientSession client(model, plan.lr);
    std::vector<EpochMetric> metrics;
    for (int epoch = 1; epoch <= plan.global_epochs; ++epoch) {
        for (std::size_t k = 0; k < shards.size(); ++k) {
            const auto& shard = shards[k];
            if (shard.size() == 0) {
                std::cerr << "client " << k << " has an empty shard, skipping\n";
                continue;
            }
            std::mt19937_64 shuffle_rng(
                rng::derive(plan.seed, 0xe90c4u + static_cast<std::uint64_t>(epoch), k));
            client.run_local_epoch(channel, shard.features, shard.labels, plan.batch_size,
                                   shuffle_rng);

            const dataio::Dataset& eval_set = test ? *test : shard;
            const Tensor prediction = client.remote_predict(channel, eval_set.features);
            EpochMetric m = metrics_from_prediction(model, prediction, eval_set.labels,
                                                    eval_set.class_count);
            m.epoch = epoch;
            m.client = static_cast<int>(k);
            metrics.push_back(m);
        }
    }
    client.finish(channel);
    return metrics;
}

TrainResult train_multi(const TrainPlan& plan, const std::vector<dataio::Dataset>& shards,
                        const dataio::Dataset* test, MessageObserver observer) {
    TrainResult result{models::build_variant(plan.variant), {}};
    ServerSession server(result.model, plan.lr);
    LoopbackChannel loopback([&server](const WireMessage& m) { return server.handle(m); });
    if (observer) {
        RecordingChannel recorded(loopback, observer);
        result.metrics = run_client_over_channel(plan, recorded, result.model, shards, test);
    } else {
        result.metrics = run_client_over_channel(plan, loopback, result.model, shards, test);
    }
    return result;
}

TrainResult train_single(const TrainPlan& plan, const dataio::Dataset& train,
                         const dataio::Dataset* test, MessageObserver observer) {
    std::vector<dataio::Dataset> shards;
    shards.push_back(train);
    return train_multi(plan, shards, test, observer);
}

std::vector<dataio::Dataset> shard_iid(const dataio::Dataset& dataset, std::size_t k,
                                       std::uint64_t seed) {
    if (k < 1) throw std::invalid_argument("need at least one shard");
    if (k > dataset.size()) throw std::invalid_argument("more shards than samples");
    if (k == 1) return {dataset};

    std::vector<std::vector<std::size_t>> by_class(
        static_cast<std::size_t>(dataset.class_count));
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        by_class[static_cast<std::size_t>(dataset.labels[i])].push_back(i);
    }
    std::mt19937_64 gen(seed);
    std::vector<std::vector<std::size_t>> shard_indices(k);
    std::size_t cursor = 0;
    for (auto& idx : by_class) {
        for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[gen() % i]);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            shard_indices[(cursor + i) % k].push_back(idx[i]);
        }
        cursor += idx.size();
    }
    std::vector<dataio::Dataset> shards;
    shards.reserve(k);
    for (auto& idx : shard_indices) {
        std::sort(idx.begin(), idx.end());
        shards.push_back(dataset.subset(idx));
    }
    return shards;
}

Tensor infer(models::SplitModel& model, const Tensor& x, InferMode mode,
             const std::optional<defense::LaplaceNoiseConfig>& defense_config) {
    Tensor smashed = model.client_forward(x, false);
    if (defense_config) {
        smashed = defense::apply_noise(smashed, *defense_config);
    }
    if (mode == InferMode::Attack) return smashed;
    return model.server_forward(smashed, false);
}

models::EvalMetrics evaluate_model(models::SplitModel& model, const dataio::Dataset& data,
                                   const std::optional<defense::LaplaceNoiseConfig>& defense_config,
                                   const std::optional<NoisyChannelConfig>& noise) {
    Tensor smashed = model.client_forward(data.features, false);
    if (defense_config) smashed = defense::apply_noise(smashed, *defense_config);

    Tensor output;
    auto* quantum = dynamic_cast<models::QuantumFrontLayer*>(model.front.get());
    if (noise && (noise->p1 > 0.0 || noise->p2 > 0.0) && quantum) {
        auto& layer = quantum->layer();
        const std::size_t n = smashed.batch();
        const std::size_t m = static_cast<std::size_t>(layer.spec.num_inputs);
        const std::size_t q = static_cast<std::size_t>(layer.spec.num_qubits);
        Tensor expect({n, q});
        for (std::size_t s = 0; s < n; ++s) {
            std::vector<double> mean(q, 0.0);
            for (int t = 0; t < noise->trajectories; ++t) {
                qsim::NoiseChannel channel(
                    noise->p1, noise->p2,
                    rng::derive(noise->seed, s, static_cast<std::uint64_t>(t)));
                const auto e = qlayer::forward_noisy(layer, {smashed.v.data() + s * m, m},
                                                     channel);
                for (std::size_t c = 0; c < q; ++c) mean[c] += e[c];
            }
            for (std::size_t c = 0; c < q; ++c) {
                expect.v[s * q + c] = mean[c] / noise->trajectories;
            }
        }
        output = model.server_rest.forward(expect, false);
    } else {
        output = model.server_forward(smashed, false);
    }

    models::EvalMetrics metrics;
    metrics.loss = neural::loss(model.loss_kind, output,
                                models::label_tensor(model, data.labels)).value;
    std::vector<int> pred(data.labels.size());
    for (std::size_t i = 0; i < data.labels.size(); ++i) {
        pred[i] = model.predict_class(output, i);
    }
    metrics.accuracy = models::accuracy_score(pred, data.labels);
    metrics.f1 = models::f1_score(pred, data.labels, data.class_count);
    return metrics;
}

}  // namespace hqsl::splitproto

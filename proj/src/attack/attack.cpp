#include "hqsl/attack/attack.hpp"

#include <memory>
#include <stdexcept>

#include "hqsl/common/rng.hpp"
#include "hqsl/imgmetrics/metrics.hpp"
#include "hqsl/splitproto/trainer.hpp"

namespace hqsl::attack {

using neural::Tensor;

AttackDataset generate_shadow_pairs(models::SplitModel& trained_client,
                                    const dataio::Dataset& images) {
    AttackDataset out;
    out.x = images.features;
    out.z = trained_client.client_forward(images.features, false);
    return out;
}

std::pair<dataio::Dataset, dataio::Dataset> split_attack_pools(
    const dataio::Dataset& held_out, std::uint64_t seed) {
    // rec : inf of 4 : 1
    auto [rec, inf] = dataio::stratified_split(held_out, 0.2, seed);
    return {std::move(rec), std::move(inf)};
}

namespace {

// Upsample -> deconv -> (batch norm) -> relu block used by models 1 and 2;
// model 1 adds a 1x1-conv skip path around it.
std::unique_ptr<neural::Sequential> decoder_block(std::size_t in_ch, std::size_t out_ch,
                                                  std::mt19937_64& gen) {
    auto block = std::make_unique<neural::Sequential>();
    block->emplace<neural::Upsample2D>(2);
    block->emplace<neural::TransposeConv2D>(in_ch, out_ch, 3, 1, 1, gen);
    block->emplace<neural::BatchNorm>(out_ch);
    block->emplace<neural::Relu>();
    return block;
}

std::unique_ptr<neural::Sequential> skip_path(std::size_t in_ch, std::size_t out_ch,
                                              std::mt19937_64& gen) {
    auto skip = std::make_unique<neural::Sequential>();
    skip->emplace<neural::Upsample2D>(2);
    skip->emplace<neural::Conv2D>(in_ch, out_ch, 1, 0, gen);
    return skip;
}

}  // namespace

ReconstructionModel build_attack_model(int id, std::uint64_t seed) {
    std::mt19937_64 gen(rng::derive(seed, 0xa77ac4));
    ReconstructionModel m;
    m.id = id;
    switch (id) {
        case 1:
            m.loss_kind = neural::LossKind::L1;
            m.optimizer_kind = "sgd";
            m.lr = 1e-3;
            m.momentum = 0.9;
            m.decoder.emplace<neural::Dense>(3, 16 * 7 * 7, gen);
            m.decoder.emplace<neural::Reshape>(neural::Shape{16, 7, 7});
            m.decoder.add(std::make_unique<neural::Residual>(decoder_block(16, 8, gen),
                                                             skip_path(16, 8, gen)));
            m.decoder.add(std::make_unique<neural::Residual>(decoder_block(8, 4, gen),
                                                             skip_path(8, 4, gen)));
            m.decoder.emplace<neural::TransposeConv2D>(4, 1, 3, 1, 1, gen);
            break;
        case 2:
            m.loss_kind = neural::LossKind::MSE;
            m.optimizer_kind = "adam";
            m.lr = 1e-3;
            m.decoder.emplace<neural::Dense>(3, 16 * 7 * 7, gen);
            m.decoder.emplace<neural::Reshape>(neural::Shape{16, 7, 7});
            m.decoder.add(decoder_block(16, 8, gen));
            m.decoder.add(decoder_block(8, 4, gen));
            m.decoder.emplace<neural::TransposeConv2D>(4, 1, 3, 1, 1, gen);  // no norm here
            break;
        case 3:
            m.loss_kind = neural::LossKind::L1PlusMSE;
            m.optimizer_kind = "rmsprop";
            m.lr = 1e-3;
            m.decoder.emplace<neural::Dense>(3, 1000, gen).emplace<neural::Relu>();
            m.decoder.emplace<neural::Dense>(1000, 1000, gen).emplace<neural::Relu>();
            m.decoder.emplace<neural::Dense>(1000, 784, gen);
            m.decoder.emplace<neural::Reshape>(neural::Shape{1, 28, 28});
            break;
        default:
            throw std::invalid_argument("unknown reconstruction model id " +
                                        std::to_string(id));
    }
    return m;
}

std::vector<double> train_attack(ReconstructionModel& model, const AttackDataset& pairs,
                                 const AttackTrainConfig& config) {
    const std::size_t n = pairs.size();
    if (n == 0) throw std::invalid_argument("attack training set is empty");
    if (config.batch_size == 0) throw std::invalid_argument("batch size must be >= 1");

    std::unique_ptr<neural::Optimizer> opt;
    if (model.optimizer_kind == "sgd") {
        opt = std::make_unique<neural::Sgd>(model.lr, model.momentum);
    } else if (model.optimizer_kind == "adam") {
        opt = std::make_unique<neural::Adam>(model.lr);
    } else if (model.optimizer_kind == "rmsprop") {
        opt = std::make_unique<neural::Rmsprop>(model.lr);
    } else {
        throw std::invalid_argument("unknown optimizer " + model.optimizer_kind);
    }

    const std::size_t zw = pairs.z.per_sample();
    const std::size_t xw = pairs.x.per_sample();
    std::mt19937_64 shuffle(rng::derive(config.seed, 0x7ea1));
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    std::vector<double> epoch_losses;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[shuffle() % i]);
        double acc = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < n; start += config.batch_size) {
            const std::size_t count = std::min(config.batch_size, n - start);
            Tensor z({count, zw});
            neural::Shape xshape = pairs.x.shape;
            xshape[0] = count;
            Tensor x(xshape);
            for (std::size_t r = 0; r < count; ++r) {
                const std::size_t src = order[start + r];
                std::copy_n(pairs.z.v.begin() + src * zw, zw, z.v.begin() + r * zw);
                std::copy_n(pairs.x.v.begin() + src * xw, xw, x.v.begin() + r * xw);
            }
            const Tensor recon = model.decoder.forward(z, true);
            const auto l = neural::loss(model.loss_kind, recon, x);
            model.decoder.backward(l.grad);
            opt->step(model.decoder.params());
            acc += l.value;
            ++batches;
        }
        epoch_losses.push_back(acc / static_cast<double>(batches));
    }
    return epoch_losses;
}

MetricReport score_reconstructions(const Tensor& originals, const Tensor& reconstructions) {
    if (originals.batch() != reconstructions.batch() ||
        originals.per_sample() != reconstructions.per_sample()) {
        throw std::invalid_argument("reconstruction batch does not match originals");
    }
    const std::size_t n = originals.batch();
    const std::size_t w = originals.per_sample();
    MetricReport report;
    std::size_t cosine_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto pair = imgmetrics::mask_pair({originals.v.data() + i * w, w},
                                                {reconstructions.v.data() + i * w, w});
        if (pair.empty()) continue;
        if (const auto dc = imgmetrics::cosine_distance(pair)) {
            report.cosine_distance += *dc;
            ++cosine_count;
        }
        report.mse += imgmetrics::mse(pair);
        report.dssim += imgmetrics::dssim(pair);
        report.lsd += imgmetrics::lsd(pair);
    }
    if (n > 0) {
        report.mse /= static_cast<double>(n);
        report.dssim /= static_cast<double>(n);
        report.lsd /= static_cast<double>(n);
    }
    if (cosine_count > 0) report.cosine_distance /= static_cast<double>(cosine_count);
    return report;
}

AttackEvaluation evaluate_attack(ReconstructionModel& model, const dataio::Dataset& targets,
                                 models::SplitModel& client_model,
                                 const std::optional<defense::LaplaceNoiseConfig>& defense) {
    AttackEvaluation eval;
    const Tensor plain_z =
        splitproto::infer(client_model, targets.features, splitproto::InferMode::Attack,
                          std::nullopt);
    const Tensor baseline_recon = model.decoder.forward(plain_z, false);
    eval.baseline = score_reconstructions(targets.features, baseline_recon);

    if (!defense) {
        eval.report = eval.baseline;
        return eval;
    }
    const Tensor defended_z = splitproto::infer(
        client_model, targets.features, splitproto::InferMode::Attack, defense);
    const Tensor defended_recon = model.decoder.forward(defended_z, false);
    eval.report = score_reconstructions(targets.features, defended_recon);
    return eval;
}

}  // namespace hqsl::attack

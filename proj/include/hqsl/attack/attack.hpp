#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hqsl/dataio/dataset.hpp"
#include "hqsl/defense/laplace.hpp"
#include "hqsl/models/split_model.hpp"
#include "hqsl/neural/loss.hpp"
#include "hqsl/neural/optim.hpp"

namespace hqsl::attack {

// (smashed feature, original image) pairs produced by the frozen client
// model, which plays the shadow-model role for an honest-but-curious server.
struct AttackDataset {
    neural::Tensor z;  // (N, cut)
    neural::Tensor x;  // (N, 1, H, W)

    std::size_t size() const { return z.batch(); }
};

AttackDataset generate_shadow_pairs(models::SplitModel& trained_client,
                                    const dataio::Dataset& images);

// Stratified 4:1 split of a held-out pool into decoder-training images and
// attack-target images; both stay disjoint from the classifier's folds.
std::pair<dataio::Dataset, dataio::Dataset> split_attack_pools(
    const dataio::Dataset& held_out, std::uint64_t seed);

struct ReconstructionModel {
    int id = 3;
    neural::Sequential decoder;  // (N, cut) -> (N, 1, 28, 28)
    neural::LossKind loss_kind = neural::LossKind::L1PlusMSE;
    std::string optimizer_kind = "rmsprop";
    double lr = 1e-3;
    double momentum = 0.0;  // sgd only
};

// 1: upsampling transpose-conv decoder with 1x1-conv skip paths and batch
//    norm, trained with SGD(1e-3, momentum 0.9) on L1.
// 2: upsampling transpose-conv decoder, batch norm after every deconv except
//    the last, MSE + Adam(1e-3).
// 3: dense 3 -> 1000 -> 1000 -> 784 with ReLU, L1+MSE + RMSprop(1e-3).
ReconstructionModel build_attack_model(int id, std::uint64_t seed);

struct AttackTrainConfig {
    int epochs = 50;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
};

// Mini-batch training on the (z, x) pairs; returns the per-epoch mean loss.
std::vector<double> train_attack(ReconstructionModel& model, const AttackDataset& pairs,
                                 const AttackTrainConfig& config);

struct MetricReport {
    double cosine_distance = 0.0;
    double mse = 0.0;
    double dssim = 0.0;
    double lsd = 0.0;
};

// Masked-pair metrics averaged over an image batch (cosine skips pairs whose
// masked vectors are degenerate).
MetricReport score_reconstructions(const neural::Tensor& originals,
                                   const neural::Tensor& reconstructions);

struct AttackEvaluation {
    MetricReport report;    // with the given defense (equals baseline when none)
    MetricReport baseline;  // defense-free reconstruction quality
};

// Runs the trained decoder on (optionally defended) smashed data from the
// target images. Ground-truth images are used only for scoring.
AttackEvaluation evaluate_attack(ReconstructionModel& model, const dataio::Dataset& targets,
                                 models::SplitModel& client_model,
                                 const std::optional<defense::LaplaceNoiseConfig>& defense);

}  // namespace hqsl::attack

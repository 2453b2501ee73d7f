#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hqsl/neural/tensor.hpp"

namespace hqsl::dataio {

// Feature matrix (N, D) or image tensor (N, 1, H, W) plus integer labels in
// [0, class_count). Immutable once built; transformations return copies.
struct Dataset {
    neural::Tensor features;
    std::vector<int> labels;
    int class_count = 0;

    std::size_t size() const { return labels.size(); }
    bool is_image() const { return features.rank() == 4; }
    std::size_t feature_dim() const { return features.per_sample(); }

    Dataset subset(const std::vector<std::size_t>& indices) const;
};

// Comma-separated values; a first line whose selected fields are not all
// numeric is treated as a header and skipped. Labels must be non-negative
// integers; class_count is max(label) + 1.
Dataset load_csv(const std::string& path, const std::vector<std::size_t>& feature_columns,
                 std::size_t label_column);

// IDX image/label pair (big-endian headers, magic 0x803 / 0x801); pixel
// bytes scale to [0, 1].
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

struct PcaResult {
    Dataset dataset;                         // projected features
    std::vector<double> explained_variance;  // descending eigenvalues
    neural::Tensor components;               // (D, kept) orthonormal columns
    std::vector<double> mean;                // feature means removed before projection
    bool degenerate = false;                 // fewer usable components than requested
};

// Centers the features, eigendecomposes the covariance with cyclic Jacobi
// rotations, and projects onto the leading eigenvectors. Each component's
// largest-magnitude entry is made positive so results are sign-stable.
PcaResult pca_reduce(const Dataset& dataset, std::size_t target_dims = 7);

struct FoldPlan {
    std::vector<std::vector<std::size_t>> folds;
    std::uint64_t seed = 0;
};

// Disjoint stratified folds covering every index; per-fold class counts stay
// within one of proportional.
FoldPlan stratified_kfold(const Dataset& dataset, std::size_t k, std::uint64_t seed);

// Train = all folds except test_fold.
std::pair<Dataset, Dataset> split_by_fold(const Dataset& dataset, const FoldPlan& plan,
                                          std::size_t test_fold);

// Seeded stratified holdout split; second element holds ~test_fraction of
// each class.
std::pair<Dataset, Dataset> stratified_split(const Dataset& dataset, double test_fraction,
                                             std::uint64_t seed);

// Gaussian blobs: class centres sit `separation` away from the origin along
// alternating signed axes, unit-variance noise, balanced classes, shuffled.
Dataset make_blobs(std::size_t n, std::size_t dims, int classes, double separation,
                   std::uint64_t seed);

// Two interleaved half-circles in 2-D with Gaussian jitter.
Dataset make_moons(std::size_t n, std::uint64_t seed, double noise = 0.1);

// 28x28 grayscale shape images (disk / hollow square / cross / stripes per
// class) with jittered geometry and foreground intensity; background pixels
// are exactly zero. Desk-scale stand-in for image classification tasks.
Dataset make_shape_images(std::size_t n, int classes, std::uint64_t seed);

// Per-feature min-max scaling to [0, 1]; constant features map to 0.
Dataset min_max_normalize(const Dataset& dataset);

}  // namespace hqsl::dataio

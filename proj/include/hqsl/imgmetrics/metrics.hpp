#pragma once

#include <optional>
#include <span>
#include <vector>

namespace hqsl::imgmetrics {

// Values of two same-shape images at the union of their nonzero positions.
struct MaskedPair {
    std::vector<double> a, b;

    bool empty() const { return a.empty(); }
    std::size_t size() const { return a.size(); }
};

MaskedPair mask_pair(std::span<const double> a, std::span<const double> b);

// 1 - cos(angle); empty for a zero vector (callers exclude it from means).
std::optional<double> cosine_distance(const MaskedPair& pair);

double mse(const MaskedPair& pair);

// Global structural dissimilarity over the masked vectors: SSIM from means,
// variances and covariance with C1 = 0.01^2, C2 = 0.03^2 (unit dynamic
// range), clamped to [0, 1], then (1 - SSIM) / 2.
double dssim(const MaskedPair& pair);

// Root-mean-square log10 intensity ratio; elements floored at 1e-8.
double lsd(const MaskedPair& pair);

}  // namespace hqsl::imgmetrics

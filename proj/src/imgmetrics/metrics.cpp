#include "hqsl/imgmetrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hqsl::imgmetrics {

namespace {
constexpr double kLsdFloor = 1e-8;

void require_nonempty(const MaskedPair& pair) {
    if (pair.empty()) throw std::invalid_argument("metric on an empty masked pair");
}
}  // namespace

MaskedPair mask_pair(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("mask_pair on images of different sizes");
    }
    MaskedPair out;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != 0.0 || b[i] != 0.0) {
            out.a.push_back(a[i]);
            out.b.push_back(b[i]);
        }
    }
    return out;
}

std::optional<double> cosine_distance(const MaskedPair& pair) {
    require_nonempty(pair);
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < pair.size(); ++i) {
        dot += pair.a[i] * pair.b[i];
        na += pair.a[i] * pair.a[i];
        nb += pair.b[i] * pair.b[i];
    }
    if (na == 0.0 || nb == 0.0) return std::nullopt;
    return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

double mse(const MaskedPair& pair) {
    require_nonempty(pair);
    double acc = 0.0;
    for (std::size_t i = 0; i < pair.size(); ++i) {
        const double d = pair.a[i] - pair.b[i];
        acc += d * d;
    }
    return acc / static_cast<double>(pair.size());
}

double dssim(const MaskedPair& pair) {
    require_nonempty(pair);
    const double n = static_cast<double>(pair.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < pair.size(); ++i) {
        ma += pair.a[i];
        mb += pair.b[i];
    }
    ma /= n;
    mb /= n;
    double va = 0.0, vb = 0.0, cov = 0.0;
    for (std::size_t i = 0; i < pair.size(); ++i) {
        const double da = pair.a[i] - ma;
        const double db = pair.b[i] - mb;
        va += da * da;
        vb += db * db;
        cov += da * db;
    }
    va /= n;
    vb /= n;
    cov /= n;
    const double c1 = 0.01 * 0.01;
    const double c2 = 0.03 * 0.03;
    double ssim = ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
                  ((ma * ma + mb * mb + c1) * (va + vb + c2));
    ssim = std::clamp(ssim, 0.0, 1.0);
    return (1.0 - ssim) / 2.0;
}

double lsd(const MaskedPair& pair) {
    require_nonempty(pair);
    double acc = 0.0;
    for (std::size_t i = 0; i < pair.size(); ++i) {
        const double a = std::max(pair.a[i], kLsdFloor);
        const double b = std::max(pair.b[i], kLsdFloor);
        const double r = std::log10(a / b);
        acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(pair.size()));
}

}  // namespace hqsl::imgmetrics

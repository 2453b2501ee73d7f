#include "hqsl/neural/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hqsl::neural {

namespace {

constexpr double kBceEps = 1e-7;

LossResult bce(const Tensor& p, const Tensor& t) {
    LossResult r;
    r.grad = Tensor(p.shape);
    const double n = static_cast<double>(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pi = std::clamp(p[i], kBceEps, 1.0 - kBceEps);
        const double ti = t[i];
        r.value += -(ti * std::log(pi) + (1.0 - ti) * std::log(1.0 - pi));
        r.grad[i] = (pi - ti) / (pi * (1.0 - pi)) / n;
    }
    r.value /= n;
    return r;
}

LossResult cross_entropy(const Tensor& logits, const Tensor& target) {
    if (logits.rank() != 2) throw std::invalid_argument("cross entropy expects (N, C) logits");
    const std::size_t n = logits.dim(0), c = logits.dim(1);
    if (target.size() != n) throw std::invalid_argument("cross entropy target size mismatch");
    LossResult r;
    r.grad = Tensor(logits.shape);
    for (std::size_t s = 0; s < n; ++s) {
        const double* row = logits.v.data() + s * c;
        const auto cls = static_cast<std::size_t>(target[s]);
        if (cls >= c) throw std::invalid_argument("class index out of range");
        const double mx = *std::max_element(row, row + c);
        double sum = 0.0;
        for (std::size_t j = 0; j < c; ++j) sum += std::exp(row[j] - mx);
        r.value += std::log(sum) + mx - row[cls];
        double* grow = r.grad.v.data() + s * c;
        for (std::size_t j = 0; j < c; ++j) {
            grow[j] = std::exp(row[j] - mx) / sum / static_cast<double>(n);
        }
        grow[cls] -= 1.0 / static_cast<double>(n);
    }
    r.value /= static_cast<double>(n);
    return r;
}

LossResult mse(const Tensor& p, const Tensor& t) {
    LossResult r;
    r.grad = Tensor(p.shape);
    const double n = static_cast<double>(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = p[i] - t[i];
        r.value += d * d;
        r.grad[i] = 2.0 * d / n;
    }
    r.value /= n;
    return r;
}

LossResult l1(const Tensor& p, const Tensor& t) {
    LossResult r;
    r.grad = Tensor(p.shape);
    const double n = static_cast<double>(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = p[i] - t[i];
        r.value += std::abs(d);
        r.grad[i] = (d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0)) / n;
    }
    r.value /= n;
    return r;
}

}  // namespace

LossResult loss(LossKind kind, const Tensor& prediction, const Tensor& target) {
    if (kind != LossKind::CrossEntropy && prediction.shape != target.shape) {
        throw std::invalid_argument("loss shape mismatch: " + shape_str(prediction.shape) +
                                    " vs " + shape_str(target.shape));
    }
    switch (kind) {
        case LossKind::BCE: return bce(prediction, target);
        case LossKind::CrossEntropy: return cross_entropy(prediction, target);
        case LossKind::MSE: return mse(prediction, target);
        case LossKind::L1: return l1(prediction, target);
        case LossKind::L1PlusMSE: {
            LossResult a = l1(prediction, target);
            const LossResult b = mse(prediction, target);
            a.value += b.value;
            for (std::size_t i = 0; i < a.grad.size(); ++i) a.grad[i] += b.grad[i];
            return a;
        }
    }
    throw std::invalid_argument("unknown loss kind");
}

LossKind loss_kind_from_string(const std::string& name) {
    if (name == "bce") return LossKind::BCE;
    if (name == "cross_entropy") return LossKind::CrossEntropy;
    if (name == "mse") return LossKind::MSE;
    if (name == "l1") return LossKind::L1;
    if (name == "l1+mse") return LossKind::L1PlusMSE;
    throw std::invalid_argument("unknown loss kind: " + name);
}

}  // namespace hqsl::neural

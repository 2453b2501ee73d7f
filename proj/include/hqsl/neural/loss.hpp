#pragma once

#include "hqsl/neural/tensor.hpp"

namespace hqsl::neural {

enum class LossKind { BCE, CrossEntropy, MSE, L1, L1PlusMSE };

struct LossResult {
    double value = 0.0;
    Tensor grad;  // d(loss)/d(prediction), same shape as prediction
};

// Mean-over-batch losses. CrossEntropy takes (N, C) logits and a length-N
// tensor of class indices; the others take same-shape prediction/target and
// average over every element. BCE clamps predictions to [1e-7, 1 - 1e-7].
LossResult loss(LossKind kind, const Tensor& prediction, const Tensor& target);

LossKind loss_kind_from_string(const std::string& name);

}  // namespace hqsl::neural

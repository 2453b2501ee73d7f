#pragma once

#include <vector>

#include "hqsl/models/split_model.hpp"
#include "hqsl/neural/tensor.hpp"

namespace hqsl::models {

struct EvalMetrics {
    double loss = 0.0;
    double accuracy = 0.0;
    double f1 = 0.0;
};

double accuracy_score(const std::vector<int>& predicted, const std::vector<int>& truth);

// Positive-class F1 for two classes, macro-averaged F1 otherwise.
double f1_score(const std::vector<int>& predicted, const std::vector<int>& truth,
                int num_classes);

// Builds the loss target for the model's head from integer labels.
neural::Tensor label_tensor(const SplitModel& model, const std::vector<int>& labels);

// Inference-mode evaluation over the whole feature tensor.
EvalMetrics evaluate(SplitModel& model, const neural::Tensor& features,
                     const std::vector<int>& labels, int num_classes);

}  // namespace hqsl::models

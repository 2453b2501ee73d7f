#include "hqsl/models/metrics.hpp"

#include <stdexcept>

namespace hqsl::models {

double accuracy_score(const std::vector<int>& predicted, const std::vector<int>& truth) {
    if (predicted.size() != truth.size() || truth.empty()) {
        throw std::invalid_argument("accuracy: size mismatch or empty input");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

namespace {
double f1_of_class(const std::vector<int>& pred, const std::vector<int>& truth, int cls) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool p = pred[i] == cls;
        const bool t = truth[i] == cls;
        tp += p && t;
        fp += p && !t;
        fn += !p && t;
    }
    const double denom = static_cast<double>(2 * tp + fp + fn);
    return denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(tp) / denom;
}
}  // namespace

double f1_score(const std::vector<int>& predicted, const std::vector<int>& truth,
                int num_classes) {
    if (predicted.size() != truth.size() || truth.empty()) {
        throw std::invalid_argument("f1: size mismatch or empty input");
    }
    if (num_classes <= 2) return f1_of_class(predicted, truth, 1);
    double acc = 0.0;
    for (int c = 0; c < num_classes; ++c) acc += f1_of_class(predicted, truth, c);
    return acc / num_classes;
}

neural::Tensor label_tensor(const SplitModel& model, const std::vector<int>& labels) {
    const std::size_t n = labels.size();
    if (model.config.variant == 1) {
        neural::Tensor t({n, 1});
        for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<double>(labels[i]);
        return t;
    }
    neural::Tensor t({n});
    for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<double>(labels[i]);
    return t;
}

EvalMetrics evaluate(SplitModel& model, const neural::Tensor& features,
                     const std::vector<int>& labels, int num_classes) {
    const neural::Tensor out = model.centralized_forward(features, false);
    const neural::Tensor target = label_tensor(model, labels);
    EvalMetrics m;
    m.loss = neural::loss(model.loss_kind, out, target).value;
    std::vector<int> pred(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        pred[i] = model.predict_class(out, i);
    }
    m.accuracy = accuracy_score(pred, labels);
    m.f1 = f1_score(pred, labels, num_classes);
    return m;
}

}  // namespace hqsl::models

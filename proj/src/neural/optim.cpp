#include "hqsl/neural/optim.hpp"

#include <cmath>

namespace hqsl::neural {

void Optimizer::step(const std::vector<ParamRef>& params) {
    for (const auto& p : params) {
        if (!p.grad) continue;
        update(p);
        std::fill(p.grad->begin(), p.grad->end(), 0.0);
    }
}

void Sgd::update(const ParamRef& p) {
    auto& w = *p.value;
    const auto& g = *p.grad;
    if (momentum_ == 0.0) {
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr_ * g[i];
        return;
    }
    auto& v = velocity_[p.value];
    if (v.size() != w.size()) v.assign(w.size(), 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) {
        v[i] = momentum_ * v[i] + g[i];
        w[i] -= lr_ * v[i];
    }
}

void Adam::update(const ParamRef& p) {
    auto& w = *p.value;
    const auto& g = *p.grad;
    auto& st = state_[p.value];
    if (st.m.size() != w.size()) {
        st.m.assign(w.size(), 0.0);
        st.v.assign(w.size(), 0.0);
        st.t = 0;
    }
    ++st.t;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(st.t));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(st.t));
    for (std::size_t i = 0; i < w.size(); ++i) {
        st.m[i] = beta1_ * st.m[i] + (1.0 - beta1_) * g[i];
        st.v[i] = beta2_ * st.v[i] + (1.0 - beta2_) * g[i] * g[i];
        const double mhat = st.m[i] / bc1;
        const double vhat = st.v[i] / bc2;
        w[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
}

void Rmsprop::update(const ParamRef& p) {
    auto& w = *p.value;
    const auto& g = *p.grad;
    auto& s = sq_avg_[p.value];
    if (s.size() != w.size()) s.assign(w.size(), 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) {
        s[i] = alpha_ * s[i] + (1.0 - alpha_) * g[i] * g[i];
        w[i] -= lr_ * g[i] / (std::sqrt(s[i]) + eps_);
    }
}

}  // namespace hqsl::neural

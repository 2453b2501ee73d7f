#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "hqsl/neural/layers.hpp"

namespace hqsl::neural {

// Applies one update per referenced parameter tensor and zeroes its gradient.
// Per-parameter state is keyed by the value buffer's address, which is stable
// because layers own their storage for their whole lifetime.
class Optimizer {
public:
    virtual ~Optimizer() = default;
    void step(const std::vector<ParamRef>& params);
    virtual std::string kind() const = 0;

protected:
    virtual void update(const ParamRef& p) = 0;
};

class Sgd : public Optimizer {
public:
    explicit Sgd(double lr, double momentum = 0.0) : lr_(lr), momentum_(momentum) {}
    std::string kind() const override { return "sgd"; }

protected:
    void update(const ParamRef& p) override;

private:
    double lr_, momentum_;
    std::unordered_map<const void*, std::vector<double>> velocity_;
};

class Adam : public Optimizer {
public:
    explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}
    std::string kind() const override { return "adam"; }

protected:
    void update(const ParamRef& p) override;

private:
    struct State {
        std::vector<double> m, v;
        long t = 0;
    };
    double lr_, beta1_, beta2_, eps_;
    std::unordered_map<const void*, State> state_;
};

class Rmsprop : public Optimizer {
public:
    explicit Rmsprop(double lr, double alpha = 0.99, double eps = 1e-8)
        : lr_(lr), alpha_(alpha), eps_(eps) {}
    std::string kind() const override { return "rmsprop"; }

protected:
    void update(const ParamRef& p) override;

private:
    double lr_, alpha_, eps_;
    std::unordered_map<const void*, std::vector<double>> sq_avg_;
};

}  // namespace hqsl::neural

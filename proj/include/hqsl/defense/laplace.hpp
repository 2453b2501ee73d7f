#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hqsl/neural/tensor.hpp"

namespace hqsl::defense {

// Additive Laplace(mu, b) noise on smashed data, with the location tuned to
// a multiple of 2*pi so the server's encoding rotations absorb the shift.
struct LaplaceNoiseConfig {
    double mu = 0.0;
    double b = 0.01;
    std::uint64_t seed = 0;
};

// i.i.d. draws via the inverse CDF: mu - b * sign(u) * ln(1 - 2|u|) with u
// uniform on (-1/2, 1/2); deterministic per seed.
std::vector<double> sample(const LaplaceNoiseConfig& config, std::size_t count);

// Element-wise addition of fresh draws; the input batch is untouched.
neural::Tensor apply_noise(const neural::Tensor& smashed, const LaplaceNoiseConfig& config);

// Closed form for E[cos^2(eta/2)] under eta ~ Laplace(mu, b):
// (1 + cos(mu) / (1 + b^2)) / 2.
double expected_fidelity(double mu, double b);

// The evaluation grid: mu in {0, pi, 2pi, 3pi, 4pi} x b in {0.01, 0.1, 0.5, 1}.
std::vector<std::pair<double, double>> sweep_grid();

}  // namespace hqsl::defense

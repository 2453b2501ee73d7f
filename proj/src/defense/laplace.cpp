#include "hqsl/defense/laplace.hpp"

#include <cmath>
#include <stdexcept>

#include "hqsl/common/rng.hpp"

namespace hqsl::defense {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check(const LaplaceNoiseConfig& config) {
    if (config.b <= 0.0) throw std::invalid_argument("laplace scale must be > 0");
}

double draw(const LaplaceNoiseConfig& config, std::mt19937_64& gen) {
    double u = rng::uniform01(gen) - 0.5;  // [-0.5, 0.5)
    double arg = 1.0 - 2.0 * std::abs(u);
    if (arg <= 0.0) arg = 0x1.0p-53;  // u landed exactly on -0.5
    const double sign = u >= 0.0 ? 1.0 : -1.0;
    return config.mu - config.b * sign * std::log(arg);
}

}  // namespace

std::vector<double> sample(const LaplaceNoiseConfig& config, std::size_t count) {
    check(config);
    if (count < 1) throw std::invalid_argument("sample count must be >= 1");
    std::mt19937_64 gen(config.seed);
    std::vector<double> out(count);
    for (auto& v : out) v = draw(config, gen);
    return out;
}

neural::Tensor apply_noise(const neural::Tensor& smashed, const LaplaceNoiseConfig& config) {
    check(config);
    std::mt19937_64 gen(config.seed);
    neural::Tensor out = smashed;
    for (auto& v : out.v) v += draw(config, gen);
    return out;
}

double expected_fidelity(double mu, double b) {
    if (b < 0.0) throw std::invalid_argument("laplace scale must be >= 0");
    return 0.5 * (1.0 + std::cos(mu) / (1.0 + b * b));
}

std::vector<std::pair<double, double>> sweep_grid() {
    std::vector<std::pair<double, double>> grid;
    for (int k = 0; k <= 4; ++k) {
        for (double b : {0.01, 0.1, 0.5, 1.0}) {
            grid.emplace_back(k * kPi, b);
        }
    }
    return grid;
}

}  // namespace hqsl::defense

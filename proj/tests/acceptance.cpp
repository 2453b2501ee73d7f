// Acceptance suite: end-to-end checks of the trained system, one line per
// criterion. Intentionally self-contained; run via ctest or directly.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hqsl/attack/attack.hpp"
#include "hqsl/common/rng.hpp"
#include "hqsl/dataio/dataset.hpp"
#include "hqsl/defense/laplace.hpp"
#include "hqsl/models/metrics.hpp"
#include "hqsl/models/split_model.hpp"
#include "hqsl/qlayer/circuit.hpp"
#include "hqsl/qlayer/layer.hpp"
#include "hqsl/qsim/state.hpp"
#include "hqsl/splitproto/trainer.hpp"

using namespace hqsl;
using neural::Tensor;

namespace {

constexpr double kPi = 3.14159265358979323846;

int g_failures = 0;

void run_criterion(const std::string& name, double time_limit_s,
                   const std::function<void()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string failure;
    try {
        body();
    } catch (const std::exception& e) {
        failure = e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (failure.empty() && elapsed > time_limit_s) {
        failure = "runtime " + std::to_string(elapsed) + "s exceeds " +
                  std::to_string(time_limit_s) + "s";
    }
    if (failure.empty()) {
        std::printf("[PASS] %s (%.2fs)\n", name.c_str(), elapsed);
    } else {
        std::printf("[FAIL] %s (%.2fs): %s\n", name.c_str(), elapsed, failure.c_str());
        ++g_failures;
    }
    std::fflush(stdout);
}

void require(bool ok, const std::string& what) {
    if (!ok) throw std::runtime_error(what);
}

Tensor random_tensor(neural::Shape shape, std::mt19937_64& gen, double lo, double hi) {
    Tensor t(std::move(shape));
    for (auto& v : t.v) v = rng::uniform(gen, lo, hi);
    return t;
}

dataio::Dataset blobs_task(std::size_t n, std::uint64_t seed) {
    return dataio::min_max_normalize(dataio::make_blobs(n, 7, 2, 4.0, seed));
}

splitproto::TrainPlan blob_plan(int clients, int epochs, std::uint64_t seed) {
    splitproto::TrainPlan plan;
    plan.clients = clients;
    plan.global_epochs = epochs;
    plan.lr = 0.001;
    plan.batch_size = 32;
    plan.seed = seed;
    plan.variant.variant = 1;
    plan.variant.quantum_front = true;
    plan.variant.circuit_id = 6;
    plan.variant.seed = seed;
    return plan;
}

// ------------------------------------------------------------------ 1

void criterion_split_equals_centralized() {
    std::mt19937_64 gen(1001);
    for (int variant : {1, 2}) {
        for (bool quantum : {true, false}) {
            models::VariantConfig config;
            config.variant = variant;
            config.num_classes = variant == 2 ? 3 : 1;
            config.quantum_front = quantum;
            config.seed = 77;
            auto model = models::build_variant(config);

            const Tensor x = variant == 1
                                 ? random_tensor({100, 7}, gen, -1.0, 1.0)
                                 : random_tensor({100, 1, 28, 28}, gen, 0.0, 1.0);
            const Tensor direct = model.centralized_forward(x, false);

            // split execution through the wire protocol
            splitproto::ServerSession server(model, 0.001);
            splitproto::LoopbackChannel channel(
                [&server](const splitproto::WireMessage& m) { return server.handle(m); });
            splitproto::ClientSession client(model, 0.001);
            const Tensor via_protocol = client.remote_predict(channel, x);

            require(direct.shape == via_protocol.shape, "output shape mismatch");
            for (std::size_t i = 0; i < direct.size(); ++i) {
                require(direct[i] == via_protocol[i],
                        "split and centralized outputs differ at element " +
                            std::to_string(i));
            }
        }
    }
}

// ------------------------------------------------------------------ 2

void criterion_gradient_fidelity() {
    std::mt19937_64 gen(2002);
    int instances = 0;

    // circuit-level jacobians against central finite differences
    for (int round = 0; round < 5; ++round) {
        for (int id = 1; id <= 10; ++id) {
            qlayer::QuantumLayer layer(qlayer::build_catalog_circuit(id));
            for (auto& p : layer.params) p = rng::uniform(gen, -kPi, kPi);
            std::vector<double> z(static_cast<std::size_t>(layer.spec.num_inputs));
            for (auto& v : z) v = rng::uniform(gen, -kPi, kPi);

            const auto grads = qlayer::parameter_shift(layer, z);
            const double h = 1e-5;
            for (std::size_t i = 0; i < layer.params.size(); ++i) {
                auto shifted = layer;
                shifted.params[i] += h;
                const auto plus = qlayer::forward(shifted, z);
                shifted.params[i] -= 2 * h;
                const auto minus = qlayer::forward(shifted, z);
                for (std::size_t c = 0; c < plus.size(); ++c) {
                    const double fd = (plus[c] - minus[c]) / (2 * h);
                    require(std::abs(grads.by_param.at(i, c) - fd) <= 1e-6,
                            "parameter-shift mismatch on circuit " + std::to_string(id));
                }
            }
            for (std::size_t j = 0; j < z.size(); ++j) {
                auto zp = z;
                zp[j] += h;
                const auto plus = qlayer::forward(layer, zp);
                zp[j] -= 2 * h;
                const auto minus = qlayer::forward(layer, zp);
                for (std::size_t c = 0; c < plus.size(); ++c) {
                    const double fd = (plus[c] - minus[c]) / (2 * h);
                    require(std::abs(grads.by_input.at(j, c) - fd) <= 1e-6,
                            "input-shift mismatch on circuit " + std::to_string(id));
                }
            }
            ++instances;
        }
    }

    // end-to-end model gradients across the cut, classical layers included
    for (int round = 0; round < 50; ++round) {
        models::VariantConfig config;
        config.variant = 1;
        config.seed = 3000 + static_cast<std::uint64_t>(round);
        config.dropout_rate = 0.0;
        auto model = models::build_variant1(config);

        const Tensor x = random_tensor({3, 7}, gen, 0.0, 1.0);
        Tensor target({3, 1});
        for (std::size_t i = 0; i < 3; ++i) target[i] = (gen() & 1) ? 1.0 : 0.0;

        auto loss_of = [&]() {
            const Tensor out = model.centralized_forward(x, true);
            return neural::loss(model.loss_kind, out, target).value;
        };
        const Tensor smashed = model.client_forward(x, true);
        const Tensor out = model.server_forward(smashed, true);
        const auto l = neural::loss(model.loss_kind, out, target);
        model.client_backward(model.server_backward(l.grad));

        const double h = 1e-5;
        for (auto& p : model.all_params()) {
            const std::vector<double> analytic = *p.grad;
            const std::size_t stride = std::max<std::size_t>(1, p.value->size() / 6);
            for (std::size_t i = 0; i < p.value->size(); i += stride) {
                const double keep = (*p.value)[i];
                (*p.value)[i] = keep + h;
                const double fp = loss_of();
                (*p.value)[i] = keep - h;
                const double fm = loss_of();
                (*p.value)[i] = keep;
                const double fd = (fp - fm) / (2 * h);
                require(std::abs(analytic[i] - fd) <= 1e-6 + 1e-5 * std::abs(fd),
                        "model gradient mismatch at " + p.name);
            }
        }
        ++instances;
    }
    require(instances == 100, "expected 100 gradient instances");
}

// ------------------------------------------------------------------ 3

void criterion_circuit_accounting_and_sweep() {
    const struct { int id, params, depth; } expected[] = {
        {7, 6, 6}, {8, 6, 8}, {6, 6, 8}, {9, 18, 20}, {10, 18, 18}};
    for (const auto& row : expected) {
        const auto spec = qlayer::build_catalog_circuit(row.id);
        require(spec.num_params == row.params,
                "circuit " + std::to_string(row.id) + " parameter count");
        require(qlayer::depth(spec) == row.depth,
                "circuit " + std::to_string(row.id) + " depth");
    }

    // full comparison table through the command-line harness
    const std::string dir = "acceptance_out";
    std::system(("mkdir -p " + dir).c_str());
    const std::string config_path = dir + "/sweep_config.json";
    const std::string csv_path = dir + "/sweep.csv";
    {
        std::ofstream os(config_path, std::ios::trunc);
        os << R"({"variant": 1, "dataset": {"kind": "blobs", "n": 500, "features": 7,)"
           << R"( "classes": 2, "separation": 4.0}, "folds": 5, "epochs": 60,)"
           << R"( "lr": 0.001, "batch_size": 32, "seed": 5, "clients": 1})";
    }
    const std::string cmd = std::string(HQSL_CLI_PATH) + " sweep-circuits --config " +
                            config_path + " --out " + csv_path + " 2>/dev/null >/dev/null";
    require(std::system(cmd.c_str()) == 0, "sweep command failed");

    std::ifstream csv(csv_path);
    require(static_cast<bool>(csv), "sweep csv missing");
    std::string line;
    std::getline(csv, line);
    require(line.find("circuit_id") != std::string::npos, "sweep csv header");
    int rows = 0, classical_rows = 0;
    while (std::getline(csv, line)) {
        std::stringstream ss(line);
        std::string front, id, params, depth, acc, f1;
        std::getline(ss, front, ',');
        std::getline(ss, id, ',');
        std::getline(ss, params, ',');
        std::getline(ss, depth, ',');
        std::getline(ss, acc, ',');
        std::getline(ss, f1, ',');
        const double accuracy = std::stod(acc);
        require(accuracy > 0.6, "circuit row " + id + " not above chance");
        if (front == "classical") {
            ++classical_rows;
        } else {
            for (const auto& row : expected) {
                if (std::to_string(row.id) == id) {
                    require(params == std::to_string(row.params), "csv params for " + id);
                    require(depth == std::to_string(row.depth), "csv depth for " + id);
                }
            }
        }
        ++rows;
    }
    require(rows == 11, "expected 10 circuit rows plus 1 classical row");
    require(classical_rows == 1, "expected exactly one classical row");
}

// ------------------------------------------------------------------ 4

void criterion_periodicity() {
    std::mt19937_64 gen(4004);
    qlayer::QuantumLayer layer(qlayer::build_catalog_circuit(6));
    int cases = 0;
    while (cases < 1000) {
        for (auto& p : layer.params) p = rng::uniform(gen, -kPi, kPi);
        std::vector<double> z{rng::uniform(gen, -kPi, kPi), rng::uniform(gen, -kPi, kPi),
                              rng::uniform(gen, -kPi, kPi)};
        const auto base = qlayer::forward(layer, z);
        const std::size_t j = static_cast<std::size_t>(cases) % 3;
        auto shifted = z;
        shifted[j] += 2.0 * kPi;
        const auto moved = qlayer::forward(layer, shifted);
        for (std::size_t c = 0; c < base.size(); ++c) {
            require(std::abs(base[c] - moved[c]) < 1e-12,
                    "output moved under a 2*pi input shift");
        }
        ++cases;
    }
}

// ------------------------------------------------------------------ 5

void criterion_fidelity_formula() {
    require(std::abs(defense::expected_fidelity(0.0, 1.0) - 0.75) < 1e-12,
            "closed form at (0, 1) must be 0.75");
    std::uint64_t stream = 0;
    for (const auto& [mu, b] : defense::sweep_grid()) {
        const auto draws = defense::sample({mu, b, rng::derive(5005, stream++)}, 100000);
        double mean = 0.0, sq = 0.0;
        for (double eta : draws) {
            const double c = std::cos(eta / 2.0);
            mean += c * c;
            sq += c * c * c * c;
        }
        mean /= static_cast<double>(draws.size());
        sq /= static_cast<double>(draws.size());
        const double se = std::sqrt(std::max(sq - mean * mean, 0.0) /
                                    static_cast<double>(draws.size()));
        const double want = defense::expected_fidelity(mu, b);
        require(std::abs(mean - want) <= 3.0 * se + 1e-12,
                "monte carlo fidelity off at mu/pi = " + std::to_string(mu / kPi) +
                    ", b = " + std::to_string(b));
    }
}

// ------------------------------------------------------------------ 6

void criterion_defense_asymmetry() {
    const auto data = dataio::make_shape_images(400, 3, 606);
    const auto [pool, test] = dataio::stratified_split(data, 0.2, 1);
    const auto [train, held_out] = dataio::stratified_split(pool, 0.25, 2);

    auto train_pipeline = [&](bool quantum) {
        splitproto::TrainPlan plan;
        plan.clients = 1;
        plan.global_epochs = 30;
        plan.lr = 0.001;
        plan.batch_size = 32;
        plan.seed = 909;
        plan.variant.variant = 2;
        plan.variant.num_classes = 3;
        plan.variant.quantum_front = quantum;
        plan.variant.circuit_id = 6;
        plan.variant.seed = 909;
        return splitproto::train_single(plan, train, &test, nullptr);
    };
    auto quantum_run = train_pipeline(true);
    auto classical_run = train_pipeline(false);
    require(quantum_run.metrics.back().accuracy >= 0.9,
            "quantum pipeline failed to train");

    const defense::LaplaceNoiseConfig defense_cfg{4.0 * kPi, 0.01, 6001};

    // (a) defended accuracy within one percentage point for the quantum front
    const auto plain =
        splitproto::evaluate_model(quantum_run.model, test, std::nullopt, std::nullopt);
    const auto defended =
        splitproto::evaluate_model(quantum_run.model, test, defense_cfg, std::nullopt);
    require(plain.accuracy - defended.accuracy <= 0.01 + 1e-12,
            "defended accuracy dropped by " +
                std::to_string(100.0 * (plain.accuracy - defended.accuracy)) + " points");

    // (b) classical front feels the shift at least ten times harder
    auto mean_front_shift = [&](models::SplitModel& model, std::uint64_t seed) {
        const Tensor z = model.client_forward(test.features, false);
        const Tensor zn = defense::apply_noise(z, {4.0 * kPi, 0.01, seed});
        const Tensor e0 = model.front->forward(z, false);
        const Tensor e1 = model.front->forward(zn, false);
        double acc = 0.0;
        const std::size_t q = e0.dim(1);
        for (std::size_t s = 0; s < e0.batch(); ++s) {
            double mx = 0.0;
            for (std::size_t c = 0; c < q; ++c) {
                mx = std::max(mx, std::abs(e1.v[s * q + c] - e0.v[s * q + c]));
            }
            acc += mx;
        }
        return acc / static_cast<double>(e0.batch());
    };
    const double quantum_shift = mean_front_shift(quantum_run.model, 6002);
    const double classical_shift = mean_front_shift(classical_run.model, 6002);
    require(classical_shift >= 10.0 * quantum_shift,
            "classical/quantum shift ratio only " +
                std::to_string(classical_shift / std::max(quantum_shift, 1e-300)));

    // (c) every attack metric on the defended quantum pipeline sits at or
    // above its no-defense baseline
    const auto [x_rec, x_inf] = attack::split_attack_pools(held_out, 3);
    const auto pairs = attack::generate_shadow_pairs(quantum_run.model, x_rec);
    auto decoder = attack::build_attack_model(3, 6003);
    attack::train_attack(decoder, pairs, {60, 16, 6004});
    const auto eval = attack::evaluate_attack(decoder, x_inf, quantum_run.model, defense_cfg);
    require(eval.report.cosine_distance >= eval.baseline.cosine_distance,
            "cosine distance fell below baseline");
    require(eval.report.mse >= eval.baseline.mse, "mse fell below baseline");
    require(eval.report.dssim >= eval.baseline.dssim, "dssim fell below baseline");
    require(eval.report.lsd >= eval.baseline.lsd, "lsd fell below baseline");
}

// ------------------------------------------------------------------ 7

void criterion_multi_client_flatness() {
    const auto data = blobs_task(500, 707);
    const auto [train, test] = dataio::stratified_split(data, 0.2, 3);
    double lo = 1.0, hi = 0.0;
    for (int k : {1, 2, 5, 10}) {
        auto plan = blob_plan(k, 60, 7007);
        const auto shards = splitproto::shard_iid(train, static_cast<std::size_t>(k), 11);
        auto result = splitproto::train_multi(plan, shards, &test, nullptr);
        const double acc = result.metrics.back().accuracy;
        lo = std::min(lo, acc);
        hi = std::max(hi, acc);
    }
    require(hi - lo <= 0.03,
            "accuracy spread " + std::to_string(100.0 * (hi - lo)) + " points across K");
}

// ------------------------------------------------------------------ 8

void criterion_shot_noise() {
    std::mt19937_64 gen(8008);
    const double bound = 5.0 / std::sqrt(1000.0);
    int exceedances = 0;
    for (int trial = 0; trial < 200; ++trial) {
        auto state = qsim::init_state(2);
        const int gates = 4 + static_cast<int>(gen() % 8);
        for (int g = 0; g < gates; ++g) {
            const int kind = static_cast<int>(gen() % 4);
            const int q = static_cast<int>(gen() % 2);
            const double angle = rng::uniform(gen, -2.0 * kPi, 2.0 * kPi);
            switch (kind) {
                case 0: state.apply(qsim::Gate::rx(q, angle)); break;
                case 1: state.apply(qsim::Gate::ry(q, angle)); break;
                case 2: state.apply(qsim::Gate::rz(q, angle)); break;
                default: state.apply(qsim::Gate::cz(0, 1)); break;
            }
        }
        const int qubit = trial % 2;
        const double exact = state.expectation_y(qubit);
        const double sampled = qsim::sample_expectation_y(
            state, qubit, 1000, rng::derive(8009, static_cast<std::uint64_t>(trial)));
        if (std::abs(sampled - exact) > bound) ++exceedances;
    }
    require(exceedances <= 1,
            std::to_string(exceedances) + " exceedances of the 5-sigma shot bound");
}

// ------------------------------------------------------------------ 9

void criterion_depolarizing_degradation() {
    const auto data = blobs_task(500, 909);
    const auto [train, test] = dataio::stratified_split(data, 0.2, 3);
    auto plan = blob_plan(1, 60, 9009);
    auto result = splitproto::train_single(plan, train, &test, nullptr);
    require(result.metrics.back().accuracy >= 0.9, "baseline model failed to train");

    std::vector<double> accuracy;
    for (double p : {0.0, 0.05, 0.09}) {
        splitproto::NoisyChannelConfig noise{p, p, 16, 9010};
        const auto metrics =
            splitproto::evaluate_model(result.model, test, std::nullopt,
                                       p > 0.0 ? std::optional(noise) : std::nullopt);
        accuracy.push_back(metrics.accuracy);
    }
    require(accuracy[1] <= accuracy[0] + 1e-12,
            "accuracy rose from p=0 to p=0.05: " + std::to_string(accuracy[0]) + " -> " +
                std::to_string(accuracy[1]));
    require(accuracy[2] <= accuracy[1] + 1e-12,
            "accuracy rose from p=0.05 to p=0.09: " + std::to_string(accuracy[1]) +
                " -> " + std::to_string(accuracy[2]));
}

// ------------------------------------------------------------------ 10

void criterion_transport_transparency() {
    const auto data = blobs_task(128, 1010);
    const auto [train, test] = dataio::stratified_split(data, 0.25, 9);
    auto plan = blob_plan(1, 3, 10010);

    auto in_process = splitproto::train_single(plan, train, &test, nullptr);

    splitproto::TcpListener listener("127.0.0.1", 0);
    auto server_model = models::build_variant(plan.variant);
    std::exception_ptr server_error;
    std::thread server([&] {
        try {
            auto channel = listener.accept();
            splitproto::ServerSession session(server_model, plan.lr);
            splitproto::serve_until_done(*channel, session);
        } catch (...) {
            server_error = std::current_exception();
        }
    });
    auto client_model = models::build_variant(plan.variant);
    auto channel = splitproto::tcp_connect("127.0.0.1", listener.port());
    std::vector<dataio::Dataset> shards;
    shards.push_back(train);
    splitproto::run_client_over_channel(plan, *channel, client_model, shards, &test);
    server.join();
    require(!server_error, "server thread raised");

    const auto a = server_model.state();
    const auto b = in_process.model.state();
    require(a.size() == b.size(), "state size mismatch");
    for (std::size_t i = 0; i < a.size(); ++i) {
        require(a[i].name == b[i].name && a[i].data == b[i].data,
                "weights differ at " + a[i].name);
    }
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    run_criterion("1. split == centralized (both variants, both fronts, bit-exact)", 1.0,
                  criterion_split_equals_centralized);
    run_criterion("2. gradient fidelity vs finite differences (100 instances)", 30.0,
                  criterion_gradient_fidelity);
    run_criterion("3. circuit accounting + full sweep table, all above chance", 1800.0,
                  criterion_circuit_accounting_and_sweep);
    run_criterion("4. 2*pi input-shift invariance (1000 cases, 1e-12)", 5.0,
                  criterion_periodicity);
    run_criterion("5. laplace fidelity formula vs monte carlo (20 grid points)", 10.0,
                  criterion_fidelity_formula);
    run_criterion("6. defense asymmetry at mu=4*pi, b=0.01", 1200.0,
                  criterion_defense_asymmetry);
    run_criterion("7. multi-client accuracy flat across K in {1,2,5,10}", 900.0,
                  criterion_multi_client_flatness);
    run_criterion("8. 1000-shot estimates within 5/sqrt(1000) of analytic", 10.0,
                  criterion_shot_noise);
    run_criterion("9. depolarizing noise degrades accuracy monotonically", 300.0,
                  criterion_depolarizing_degradation);
    run_criterion("10. tcp training reproduces in-process weights bit-exactly", 120.0,
                  criterion_transport_transparency);
    if (g_failures == 0) {
        std::printf("all criteria passed\n");
    } else {
        std::printf("%d criteria failed\n", g_failures);
    }
    return g_failures;
}

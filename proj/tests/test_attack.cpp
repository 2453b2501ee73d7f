#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hqsl/attack/attack.hpp"
#include "hqsl/common/rng.hpp"
#include "hqsl/dataio/dataset.hpp"

using namespace hqsl;
using attack::AttackTrainConfig;
using neural::Tensor;

namespace {

models::SplitModel fresh_client(std::uint64_t seed) {
    models::VariantConfig config;
    config.variant = 2;
    config.num_classes = 2;
    config.seed = seed;
    return models::build_variant2(config);
}

}  // namespace

TEST_CASE("shadow pairs come from the frozen client") {
    auto client = fresh_client(5);
    const auto images = dataio::make_shape_images(100, 2, 9);
    const auto pairs = attack::generate_shadow_pairs(client, images);
    CHECK(pairs.size() == 100);
    CHECK(pairs.z.shape == neural::Shape{100, 3});
    CHECK(pairs.x.shape == images.features.shape);

    const auto again = attack::generate_shadow_pairs(client, images);
    CHECK(pairs.z.v == again.z.v);  // frozen client, bit-identical features
}

TEST_CASE("attack pool split is disjoint and 4:1") {
    const auto held_out = dataio::make_shape_images(100, 2, 31);
    const auto [rec, inf] = attack::split_attack_pools(held_out, 3);
    CHECK(rec.size() == 80);
    CHECK(inf.size() == 20);
    // feature rows must not collide (continuous pixels; collision means overlap)
    const std::size_t w = held_out.feature_dim();
    for (std::size_t i = 0; i < rec.size(); ++i) {
        for (std::size_t j = 0; j < inf.size(); ++j) {
            bool same = true;
            for (std::size_t p = 0; p < w && same; ++p) {
                same = rec.features.v[i * w + p] == inf.features.v[j * w + p];
            }
            CHECK_FALSE(same);
        }
    }
}

TEST_CASE("decoder architectures") {
    SUBCASE("model 3 is the published dense stack") {
        auto m = attack::build_attack_model(3, 1);
        // 3*1000+1000 + 1000*1000+1000 + 1000*784+784
        CHECK(neural::param_count(m.decoder) == 1789784);
        CHECK(m.loss_kind == neural::LossKind::L1PlusMSE);
        CHECK(m.optimizer_kind == "rmsprop");
        Tensor z({2, 3}, {0.1, -0.2, 0.4, 0.0, 0.3, -0.1});
        CHECK(m.decoder.forward(z, false).shape == neural::Shape{2, 1, 28, 28});
    }
    SUBCASE("model 2 ends without batch norm") {
        auto m = attack::build_attack_model(2, 1);
        CHECK(m.decoder.at(m.decoder.size() - 1).kind() == "transposeconv2d");
        int norms = 0;
        for (const auto& p : m.decoder.buffers()) norms += p.name.find("run_mean") != std::string::npos;
        CHECK(norms == 2);  // one per upsampling block only
        CHECK(m.optimizer_kind == "adam");
        Tensor z({1, 3}, {0.2, 0.1, -0.3});
        CHECK(m.decoder.forward(z, false).shape == neural::Shape{1, 1, 28, 28});
    }
    SUBCASE("model 1 adds skip paths") {
        auto m = attack::build_attack_model(1, 1);
        int residuals = 0;
        for (std::size_t i = 0; i < m.decoder.size(); ++i) {
            residuals += m.decoder.at(i).kind() == "residual";
        }
        CHECK(residuals == 2);
        CHECK(m.optimizer_kind == "sgd");
        CHECK(m.momentum == doctest::Approx(0.9));
        Tensor z({1, 3}, {0.2, 0.1, -0.3});
        CHECK(m.decoder.forward(z, false).shape == neural::Shape{1, 1, 28, 28});
    }
    SUBCASE("unknown id rejected") {
        CHECK_THROWS_AS(attack::build_attack_model(4, 1), std::invalid_argument);
    }
}

TEST_CASE("attack training") {
    auto client = fresh_client(11);
    const auto images = dataio::make_shape_images(60, 2, 13);
    const auto pairs = attack::generate_shadow_pairs(client, images);

    SUBCASE("loss decreases on the training pairs") {
        auto m = attack::build_attack_model(3, 2);
        const auto trace = attack::train_attack(m, pairs, {15, 16, 3});
        REQUIRE(trace.size() == 15);
        CHECK(trace.back() < trace.front());
    }
    SUBCASE("zero learning rate freezes the loss") {
        auto m = attack::build_attack_model(3, 2);
        m.lr = 0.0;
        // equal-size batches so the epoch mean is grouping-independent
        const auto trace = attack::train_attack(m, pairs, {4, 15, 3});
        for (double l : trace) CHECK(l == doctest::Approx(trace[0]).epsilon(1e-9));
    }
    SUBCASE("seeded rerun is identical") {
        auto a = attack::build_attack_model(3, 2);
        auto b = attack::build_attack_model(3, 2);
        const auto ta = attack::train_attack(a, pairs, {5, 16, 3});
        const auto tb = attack::train_attack(b, pairs, {5, 16, 3});
        CHECK(ta == tb);
    }
    SUBCASE("empty dataset rejected") {
        auto m = attack::build_attack_model(3, 2);
        attack::AttackDataset empty;
        empty.z = Tensor({0, 3});
        empty.x = Tensor({0, 1, 28, 28});
        CHECK_THROWS_AS(attack::train_attack(m, empty, {1, 8, 0}), std::invalid_argument);
    }
}

TEST_CASE("reconstruction scoring") {
    SUBCASE("identity reconstruction scores zero on every metric") {
        const auto images = dataio::make_shape_images(10, 2, 17);
        const auto report = attack::score_reconstructions(images.features, images.features);
        CHECK(report.cosine_distance < 1e-12);
        CHECK(report.mse < 1e-12);
        CHECK(report.dssim < 1e-12);
        CHECK(report.lsd < 1e-12);
    }
    SUBCASE("defense off reproduces the baseline row") {
        auto client = fresh_client(19);
        const auto images = dataio::make_shape_images(20, 2, 23);
        auto m = attack::build_attack_model(3, 7);
        const auto pairs = attack::generate_shadow_pairs(client, images);
        attack::train_attack(m, pairs, {3, 8, 5});
        const auto eval = attack::evaluate_attack(m, images, client, std::nullopt);
        CHECK(eval.report.mse == eval.baseline.mse);
        CHECK(eval.report.cosine_distance == eval.baseline.cosine_distance);
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "hqsl/common/rng.hpp"
#include "hqsl/dataio/dataset.hpp"

using namespace hqsl;
using dataio::Dataset;

namespace {

const char* kFixtureDir = HQSL_FIXTURE_DIR;

std::string fixture(const std::string& name) { return std::string(kFixtureDir) + "/" + name; }

// Plain logistic regression trained with gradient descent; the independent
// oracle for "a linear classifier solves this task".
double logistic_oracle_accuracy(const Dataset& train, const Dataset& test) {
    const std::size_t d = train.feature_dim();
    std::vector<double> w(d + 1, 0.0);
    for (int epoch = 0; epoch < 300; ++epoch) {
        std::vector<double> g(d + 1, 0.0);
        for (std::size_t i = 0; i < train.size(); ++i) {
            double z = w[d];
            for (std::size_t j = 0; j < d; ++j) z += w[j] * train.features.v[i * d + j];
            const double p = 1.0 / (1.0 + std::exp(-z));
            const double err = p - train.labels[i];
            for (std::size_t j = 0; j < d; ++j) g[j] += err * train.features.v[i * d + j];
            g[d] += err;
        }
        for (std::size_t j = 0; j <= d; ++j) w[j] -= 0.1 * g[j] / train.size();
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        double z = w[d];
        for (std::size_t j = 0; j < d; ++j) z += w[j] * test.features.v[i * d + j];
        hits += (z >= 0.0 ? 1 : 0) == test.labels[i];
    }
    return static_cast<double>(hits) / test.size();
}

// Writes a hand-assembled IDX pair (big-endian headers) so the loader is
// checked against the byte layout, not against our own writer.
void write_idx_pair(const std::string& img_path, const std::string& lbl_path,
                    const std::vector<std::vector<unsigned char>>& images,
                    const std::vector<unsigned char>& labels, std::uint32_t rows,
                    std::uint32_t cols, bool truncate_images = false) {
    auto be32 = [](std::ofstream& os, std::uint32_t v) {
        const unsigned char b[4] = {
            static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
            static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
        os.write(reinterpret_cast<const char*>(b), 4);
    };
    std::ofstream img(img_path, std::ios::binary | std::ios::trunc);
    be32(img, 0x00000803u);
    be32(img, static_cast<std::uint32_t>(images.size()));
    be32(img, rows);
    be32(img, cols);
    for (std::size_t i = 0; i < images.size(); ++i) {
        std::size_t count = images[i].size();
        if (truncate_images && i + 1 == images.size()) count /= 2;
        img.write(reinterpret_cast<const char*>(images[i].data()),
                  static_cast<std::streamsize>(count));
    }
    img.close();
    std::ofstream lbl(lbl_path, std::ios::binary | std::ios::trunc);
    be32(lbl, 0x00000801u);
    be32(lbl, static_cast<std::uint32_t>(labels.size()));
    lbl.write(reinterpret_cast<const char*>(labels.data()),
              static_cast<std::streamsize>(labels.size()));
}

}  // namespace

TEST_CASE("csv loader") {
    SUBCASE("seven-feature binary fixture") {
        const auto ds = dataio::load_csv(fixture("tabular7.csv"), {0, 1, 2, 3, 4, 5, 6}, 7);
        CHECK(ds.size() == 120);
        CHECK(ds.feature_dim() == 7);
        CHECK(ds.class_count == 2);
    }
    SUBCASE("header is skipped automatically") {
        const std::string path = "/tmp/hqsl_csv_header.csv";
        std::ofstream(path) << "a,b,label\n1.0,2.0,0\n3.0,4.0,1\n";
        const auto ds = dataio::load_csv(path, {0, 1}, 2);
        CHECK(ds.size() == 2);
        CHECK(ds.features.v[0] == 1.0);
        std::remove(path.c_str());
    }
    SUBCASE("missing label column is an error") {
        const std::string path = "/tmp/hqsl_csv_short.csv";
        std::ofstream(path) << "1.0,2.0\n";
        CHECK_THROWS_AS(dataio::load_csv(path, {0, 1}, 5), std::runtime_error);
        std::remove(path.c_str());
    }
    SUBCASE("malformed row reports its line number") {
        const std::string path = "/tmp/hqsl_csv_bad.csv";
        std::ofstream(path) << "1.0,2.0,0\nx,4.0,1\n";
        try {
            dataio::load_csv(path, {0, 1}, 2);
            FAIL("expected error");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()).find(":2") != std::string::npos);
        }
        std::remove(path.c_str());
    }
}

TEST_CASE("idx loader") {
    const std::string img_path = "/tmp/hqsl_images_idx";
    const std::string lbl_path = "/tmp/hqsl_labels_idx";
    std::vector<std::vector<unsigned char>> images;
    std::vector<unsigned char> labels;
    for (int i = 0; i < 10; ++i) {
        std::vector<unsigned char> img(28 * 28, 0);
        img[0] = 255;
        img[5] = static_cast<unsigned char>(10 * i);
        images.push_back(img);
        labels.push_back(static_cast<unsigned char>(i % 3));
    }
    SUBCASE("round trip and pixel scaling") {
        write_idx_pair(img_path, lbl_path, images, labels, 28, 28);
        const auto ds = dataio::load_idx(img_path, lbl_path);
        CHECK(ds.features.shape == neural::Shape{10, 1, 28, 28});
        CHECK(ds.class_count == 3);
        CHECK(ds.features.v[0] == 1.0);  // byte 255 scales to exactly 1
        CHECK(ds.features.v[5] == doctest::Approx(0.0));
        CHECK(ds.labels[4] == 1);
    }
    SUBCASE("truncated file is an error") {
        write_idx_pair(img_path, lbl_path, images, labels, 28, 28, true);
        CHECK_THROWS_AS(dataio::load_idx(img_path, lbl_path), std::runtime_error);
    }
    SUBCASE("magic mismatch is an error") {
        write_idx_pair(img_path, lbl_path, images, labels, 28, 28);
        CHECK_THROWS_AS(dataio::load_idx(lbl_path, img_path), std::runtime_error);
    }
    SUBCASE("count mismatch between files is an error") {
        labels.pop_back();
        write_idx_pair(img_path, lbl_path, images, labels, 28, 28);
        CHECK_THROWS_AS(dataio::load_idx(img_path, lbl_path), std::runtime_error);
    }
    std::remove(img_path.c_str());
    std::remove(lbl_path.c_str());
}

TEST_CASE("pca") {
    SUBCASE("orthogonal columns reproduce the centered input up to sign") {
        // build exactly orthogonal centered columns with distinct scales
        const std::size_t n = 24, d = 5;
        std::mt19937_64 gen(3);
        std::vector<std::vector<double>> cols(d, std::vector<double>(n));
        for (std::size_t j = 0; j < d; ++j) {
            for (std::size_t i = 0; i < n; ++i) cols[j][i] = rng::uniform(gen, -1.0, 1.0);
        }
        for (std::size_t j = 0; j < d; ++j) {
            double mean = 0.0;
            for (double v : cols[j]) mean += v;
            for (auto& v : cols[j]) v -= mean / n;
            for (std::size_t prev = 0; prev < j; ++prev) {
                double dot = 0.0, nn = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    dot += cols[j][i] * cols[prev][i];
                    nn += cols[prev][i] * cols[prev][i];
                }
                for (std::size_t i = 0; i < n; ++i) cols[j][i] -= dot / nn * cols[prev][i];
            }
            double norm = 0.0;
            for (double v : cols[j]) norm += v * v;
            norm = std::sqrt(norm);
            const double scale = static_cast<double>(d - j);
            for (auto& v : cols[j]) v = v / norm * scale;
        }
        Dataset ds;
        ds.class_count = 2;
        ds.labels.assign(n, 0);
        ds.features = neural::Tensor({n, d});
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < d; ++j) ds.features.v[i * d + j] = cols[j][i];
        }
        const auto pca = dataio::pca_reduce(ds, d);
        REQUIRE(pca.dataset.feature_dim() == d);
        for (std::size_t j = 0; j < d; ++j) {
            // column j of the projection must match column j of the input up to a sign
            double plus = 0.0, minus = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                plus = std::max(plus, std::abs(pca.dataset.features.v[i * d + j] - cols[j][i]));
                minus = std::max(minus,
                                 std::abs(pca.dataset.features.v[i * d + j] + cols[j][i]));
            }
            CHECK(std::min(plus, minus) < 1e-8);
        }
    }
    SUBCASE("explained variances are non-increasing and components orthonormal") {
        Dataset ds = dataio::make_blobs(60, 9, 2, 2.0, 11);
        const auto pca = dataio::pca_reduce(ds, 7);
        for (std::size_t i = 1; i < pca.explained_variance.size(); ++i) {
            CHECK(pca.explained_variance[i] <= pca.explained_variance[i - 1] + 1e-12);
        }
        const std::size_t d = 9, k = pca.components.dim(1);
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = 0; b < k; ++b) {
                double dot = 0.0;
                for (std::size_t j = 0; j < d; ++j) {
                    dot += pca.components.v[j * k + a] * pca.components.v[j * k + b];
                }
                CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) < 1e-10);
            }
        }
    }
    SUBCASE("projected covariance is diagonal") {
        Dataset ds = dataio::make_blobs(80, 9, 2, 1.5, 13);
        const auto pca = dataio::pca_reduce(ds, 7);
        const std::size_t n = pca.dataset.size(), k = pca.dataset.feature_dim();
        std::vector<double> mean(k, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < k; ++j) mean[j] += pca.dataset.features.v[i * k + j];
        }
        for (auto& m : mean) m /= n;
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = a + 1; b < k; ++b) {
                double cov = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    cov += (pca.dataset.features.v[i * k + a] - mean[a]) *
                           (pca.dataset.features.v[i * k + b] - mean[b]);
                }
                cov /= n - 1;
                CHECK(std::abs(cov) < 1e-8);
            }
        }
    }
    SUBCASE("rank-deficient data keeps fewer components and warns") {
        const std::size_t n = 20;
        Dataset ds;
        ds.class_count = 2;
        ds.labels.assign(n, 0);
        ds.features = neural::Tensor({n, 8});
        std::mt19937_64 gen(5);
        for (std::size_t i = 0; i < n; ++i) {
            double base[3];
            for (auto& b : base) b = rng::uniform(gen, -1.0, 1.0);
            for (std::size_t j = 0; j < 8; ++j) ds.features.v[i * 8 + j] = base[j % 3];
        }
        const auto pca = dataio::pca_reduce(ds, 7);
        CHECK(pca.degenerate);
        CHECK(pca.dataset.feature_dim() == 3);
    }
}

TEST_CASE("stratified k-fold") {
    Dataset ds = dataio::make_blobs(100, 4, 2, 3.0, 21);
    SUBCASE("100 samples split 50/50 give 10+10 per fold") {
        const auto plan = dataio::stratified_kfold(ds, 5, 1);
        std::set<std::size_t> all;
        for (const auto& fold : plan.folds) {
            CHECK(fold.size() == 20);
            int per_class[2] = {0, 0};
            for (std::size_t i : fold) {
                ++per_class[ds.labels[i]];
                all.insert(i);
            }
            CHECK(per_class[0] == 10);
            CHECK(per_class[1] == 10);
        }
        CHECK(all.size() == 100);  // disjoint union covers everything
    }
    SUBCASE("different seeds permute but keep stratification") {
        const auto a = dataio::stratified_kfold(ds, 5, 1);
        const auto b = dataio::stratified_kfold(ds, 5, 2);
        CHECK(a.folds[0] != b.folds[0]);
        for (const auto& fold : b.folds) {
            int ones = 0;
            for (std::size_t i : fold) ones += ds.labels[i];
            CHECK(ones == 10);
        }
    }
    SUBCASE("k = 1 is rejected") {
        CHECK_THROWS_AS(dataio::stratified_kfold(ds, 1, 0), std::invalid_argument);
    }
    SUBCASE("class smaller than k is rejected") {
        Dataset tiny = dataio::make_blobs(8, 3, 2, 2.0, 3);
        CHECK_THROWS_AS(dataio::stratified_kfold(tiny, 5, 0), std::invalid_argument);
    }
    SUBCASE("train/test reconstruction") {
        const auto plan = dataio::stratified_kfold(ds, 5, 9);
        const auto [train, test] = dataio::split_by_fold(ds, plan, 0);
        CHECK(train.size() == 80);
        CHECK(test.size() == 20);
    }
}

TEST_CASE("synthetic generators") {
    SUBCASE("blobs are balanced, deterministic, and linearly solvable") {
        const auto ds = dataio::make_blobs(1000, 7, 2, 4.0, 42);
        int counts[2] = {0, 0};
        for (int l : ds.labels) ++counts[l];
        CHECK(std::abs(counts[0] - counts[1]) <= 1);

        const auto again = dataio::make_blobs(1000, 7, 2, 4.0, 42);
        CHECK(ds.features.v == again.features.v);
        CHECK(ds.labels == again.labels);

        const auto [train, test] = dataio::stratified_split(ds, 0.2, 1);
        CHECK(logistic_oracle_accuracy(train, test) >= 0.99);
    }
    SUBCASE("moons are 2-d and balanced") {
        const auto ds = dataio::make_moons(200, 5);
        CHECK(ds.feature_dim() == 2);
        int ones = 0;
        for (int l : ds.labels) ones += l;
        CHECK(std::abs(ones - 100) <= 1);
    }
    SUBCASE("shape images have zero background and class-dependent structure") {
        const auto ds = dataio::make_shape_images(12, 3, 77);
        CHECK(ds.features.shape == neural::Shape{12, 1, 28, 28});
        std::size_t zeros = 0, nonzeros = 0;
        for (double v : ds.features.v) (v == 0.0 ? zeros : nonzeros)++;
        CHECK(zeros > 0);
        CHECK(nonzeros > 0);
        const auto again = dataio::make_shape_images(12, 3, 77);
        CHECK(ds.features.v == again.features.v);
    }
}

TEST_CASE("min-max normalization is idempotent") {
    auto ds = dataio::make_blobs(50, 5, 2, 3.0, 8);
    const auto once = dataio::min_max_normalize(ds);
    const auto twice = dataio::min_max_normalize(once);
    CHECK(once.features.v == twice.features.v);
    for (double v : once.features.v) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

#include "hqsl/dataio/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "hqsl/common/rng.hpp"

namespace hqsl::dataio {

using neural::Shape;
using neural::Tensor;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void shuffle_indices(std::vector<std::size_t>& idx, std::mt19937_64& gen) {
    for (std::size_t i = idx.size(); i > 1; --i) {
        std::swap(idx[i - 1], idx[gen() % i]);
    }
}

std::vector<std::vector<std::size_t>> indices_by_class(const Dataset& ds) {
    std::vector<std::vector<std::size_t>> by_class(
        static_cast<std::size_t>(ds.class_count));
    for (std::size_t i = 0; i < ds.size(); ++i) {
        by_class[static_cast<std::size_t>(ds.labels[i])].push_back(i);
    }
    return by_class;
}

int max_label_plus_one(const std::vector<int>& labels) {
    int mx = -1;
    for (int l : labels) mx = std::max(mx, l);
    return mx + 1;
}

}  // namespace

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
    Dataset out;
    out.class_count = class_count;
    Shape shape = features.shape;
    shape[0] = indices.size();
    out.features = Tensor(shape);
    const std::size_t stride = features.per_sample();
    out.labels.reserve(indices.size());
    for (std::size_t r = 0; r < indices.size(); ++r) {
        const std::size_t src = indices[r];
        if (src >= size()) throw std::out_of_range("subset index out of range");
        std::copy_n(features.v.begin() + src * stride, stride,
                    out.features.v.begin() + r * stride);
        out.labels.push_back(labels[src]);
    }
    return out;
}

// ---------------------------------------------------------------- CSV

Dataset load_csv(const std::string& path, const std::vector<std::size_t>& feature_columns,
                 std::size_t label_column) {
    if (feature_columns.empty()) throw std::invalid_argument("no feature columns selected");
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open csv: " + path);

    std::vector<double> values;
    std::vector<int> labels;
    std::string line;
    std::size_t line_no = 0;
    bool first_data_line = true;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);

        std::size_t needed = label_column;
        for (std::size_t c : feature_columns) needed = std::max(needed, c);
        if (fields.size() <= needed) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected at least " + std::to_string(needed + 1) +
                                     " columns, got " + std::to_string(fields.size()));
        }

        auto parse = [&](const std::string& s, double& out) {
            try {
                std::size_t pos = 0;
                out = std::stod(s, &pos);
                while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) {
                    ++pos;
                }
                return pos == s.size();
            } catch (...) {
                return false;
            }
        };

        std::vector<double> row(feature_columns.size());
        double label_value = 0.0;
        bool ok = parse(fields[label_column], label_value);
        for (std::size_t i = 0; ok && i < feature_columns.size(); ++i) {
            ok = parse(fields[feature_columns[i]], row[i]);
        }
        if (!ok) {
            if (first_data_line) {
                first_data_line = false;  // header row
                continue;
            }
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": malformed numeric field");
        }
        first_data_line = false;
        if (label_value < 0.0 || label_value != std::floor(label_value)) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": label must be a non-negative integer");
        }
        values.insert(values.end(), row.begin(), row.end());
        labels.push_back(static_cast<int>(label_value));
    }
    if (labels.empty()) throw std::runtime_error("csv has no data rows: " + path);

    Dataset ds;
    ds.features = Tensor({labels.size(), feature_columns.size()}, std::move(values));
    ds.labels = std::move(labels);
    ds.class_count = max_label_plus_one(ds.labels);
    return ds;
}

// ---------------------------------------------------------------- IDX

namespace {
std::uint32_t read_be32(std::istream& is, const std::string& path) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw std::runtime_error("truncated idx file: " + path);
    return (static_cast<std::uint32_t>(b[0]) << 24) | (static_cast<std::uint32_t>(b[1]) << 16) |
           (static_cast<std::uint32_t>(b[2]) << 8) | static_cast<std::uint32_t>(b[3]);
}
}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream imgs(images_path, std::ios::binary);
    if (!imgs) throw std::runtime_error("cannot open idx images: " + images_path);
    if (read_be32(imgs, images_path) != 0x00000803u) {
        throw std::runtime_error("bad idx image magic in " + images_path);
    }
    const std::uint32_t count = read_be32(imgs, images_path);
    const std::uint32_t rows = read_be32(imgs, images_path);
    const std::uint32_t cols = read_be32(imgs, images_path);

    std::ifstream lbls(labels_path, std::ios::binary);
    if (!lbls) throw std::runtime_error("cannot open idx labels: " + labels_path);
    if (read_be32(lbls, labels_path) != 0x00000801u) {
        throw std::runtime_error("bad idx label magic in " + labels_path);
    }
    const std::uint32_t label_count = read_be32(lbls, labels_path);
    if (label_count != count) {
        throw std::runtime_error("idx image/label count mismatch: " + std::to_string(count) +
                                 " vs " + std::to_string(label_count));
    }

    Dataset ds;
    ds.features = Tensor({count, 1, rows, cols});
    ds.labels.resize(count);
    std::vector<unsigned char> buf(static_cast<std::size_t>(rows) * cols);
    for (std::uint32_t i = 0; i < count; ++i) {
        imgs.read(reinterpret_cast<char*>(buf.data()),
                  static_cast<std::streamsize>(buf.size()));
        if (!imgs) throw std::runtime_error("truncated idx file: " + images_path);
        double* out = ds.features.v.data() + static_cast<std::size_t>(i) * buf.size();
        for (std::size_t p = 0; p < buf.size(); ++p) out[p] = buf[p] / 255.0;
        unsigned char label;
        lbls.read(reinterpret_cast<char*>(&label), 1);
        if (!lbls) throw std::runtime_error("truncated idx file: " + labels_path);
        ds.labels[i] = label;
    }
    ds.class_count = max_label_plus_one(ds.labels);
    return ds;
}

// ---------------------------------------------------------------- PCA

namespace {

// Cyclic Jacobi eigen decomposition of a symmetric matrix. `a` is destroyed;
// eigenvectors come back as columns of `v`.
void jacobi_eigen(std::vector<double>& a, std::size_t d, std::vector<double>& eig,
                  std::vector<double>& v) {
    v.assign(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) v[i * d + i] = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) off += a[p * d + q] * a[p * d + q];
        }
        if (off < 1e-24) break;
        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                const double apq = a[p * d + q];
                if (std::abs(apq) < 1e-300) continue;
                const double app = a[p * d + p];
                const double aqq = a[q * d + q];
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < d; ++k) {
                    const double akp = a[k * d + p];
                    const double akq = a[k * d + q];
                    a[k * d + p] = c * akp - s * akq;
                    a[k * d + q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    const double apk = a[p * d + k];
                    const double aqk = a[q * d + k];
                    a[p * d + k] = c * apk - s * aqk;
                    a[q * d + k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    const double vkp = v[k * d + p];
                    const double vkq = v[k * d + q];
                    v[k * d + p] = c * vkp - s * vkq;
                    v[k * d + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    eig.resize(d);
    for (std::size_t i = 0; i < d; ++i) eig[i] = a[i * d + i];
}

}  // namespace

PcaResult pca_reduce(const Dataset& dataset, std::size_t target_dims) {
    if (dataset.is_image()) throw std::invalid_argument("pca expects flat features");
    const std::size_t n = dataset.size();
    const std::size_t d = dataset.feature_dim();
    if (n < 2) throw std::invalid_argument("pca needs at least two samples");
    if (d < target_dims) throw std::invalid_argument("pca target exceeds feature count");

    PcaResult result;
    result.mean.assign(d, 0.0);
    const auto& x = dataset.features.v;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) result.mean[j] += x[i * d + j];
    }
    for (auto& m : result.mean) m /= static_cast<double>(n);

    std::vector<double> cov(d * d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < d; ++a) {
            const double xa = x[i * d + a] - result.mean[a];
            for (std::size_t b = a; b < d; ++b) {
                cov[a * d + b] += xa * (x[i * d + b] - result.mean[b]);
            }
        }
    }
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a; b < d; ++b) {
            cov[a * d + b] /= static_cast<double>(n - 1);
            cov[b * d + a] = cov[a * d + b];
        }
    }

    std::vector<double> eig, vecs;
    jacobi_eigen(cov, d, eig, vecs);

    std::vector<std::size_t> order(d);
    for (std::size_t i = 0; i < d; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return eig[a] > eig[b]; });

    const double scale = std::max(std::abs(eig[order[0]]), 1.0);
    std::size_t kept = 0;
    while (kept < target_dims && eig[order[kept]] > 1e-12 * scale) ++kept;
    if (kept < target_dims) {
        result.degenerate = true;
        std::cerr << "pca: covariance rank " << kept << " below requested "
                  << target_dims << ", keeping " << kept << " components\n";
    }
    if (kept == 0) throw std::runtime_error("pca: covariance has no usable components");

    result.components = Tensor({d, kept});
    result.explained_variance.resize(kept);
    for (std::size_t c = 0; c < kept; ++c) {
        const std::size_t src = order[c];
        result.explained_variance[c] = eig[src];
        // sign fix: largest-magnitude entry positive
        std::size_t arg = 0;
        for (std::size_t j = 1; j < d; ++j) {
            if (std::abs(vecs[j * d + src]) > std::abs(vecs[arg * d + src])) arg = j;
        }
        const double sign = vecs[arg * d + src] >= 0.0 ? 1.0 : -1.0;
        for (std::size_t j = 0; j < d; ++j) {
            result.components.v[j * kept + c] = sign * vecs[j * d + src];
        }
    }

    result.dataset.class_count = dataset.class_count;
    result.dataset.labels = dataset.labels;
    result.dataset.features = Tensor({n, kept});
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < kept; ++c) {
            double acc = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                acc += (x[i * d + j] - result.mean[j]) * result.components.v[j * kept + c];
            }
            result.dataset.features.v[i * kept + c] = acc;
        }
    }
    return result;
}

// ---------------------------------------------------------------- folds & splits

FoldPlan stratified_kfold(const Dataset& dataset, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("k-fold needs k >= 2");
    if (dataset.class_count < 1) throw std::invalid_argument("dataset has no classes");
    FoldPlan plan;
    plan.seed = seed;
    plan.folds.assign(k, {});
    std::mt19937_64 gen(seed);
    std::size_t cursor = 0;
    for (auto& idx : indices_by_class(dataset)) {
        if (idx.size() < k) {
            throw std::invalid_argument("a class has fewer samples than folds");
        }
        shuffle_indices(idx, gen);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            plan.folds[(cursor + i) % k].push_back(idx[i]);
        }
        cursor += idx.size();
    }
    return plan;
}

std::pair<Dataset, Dataset> split_by_fold(const Dataset& dataset, const FoldPlan& plan,
                                          std::size_t test_fold) {
    if (test_fold >= plan.folds.size()) throw std::out_of_range("fold index out of range");
    std::vector<std::size_t> train;
    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
        if (f == test_fold) continue;
        train.insert(train.end(), plan.folds[f].begin(), plan.folds[f].end());
    }
    return {dataset.subset(train), dataset.subset(plan.folds[test_fold])};
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& dataset, double test_fraction,
                                             std::uint64_t seed) {
    if (test_fraction <= 0.0 || test_fraction >= 1.0) {
        throw std::invalid_argument("test fraction must be in (0, 1)");
    }
    std::mt19937_64 gen(seed);
    std::vector<std::size_t> train, test;
    for (auto& idx : indices_by_class(dataset)) {
        shuffle_indices(idx, gen);
        const std::size_t n_test = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::lround(test_fraction *
                                                    static_cast<double>(idx.size()))));
        for (std::size_t i = 0; i < idx.size(); ++i) {
            (i < n_test ? test : train).push_back(idx[i]);
        }
    }
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {dataset.subset(train), dataset.subset(test)};
}

// ---------------------------------------------------------------- synthetic

Dataset make_blobs(std::size_t n, std::size_t dims, int classes, double separation,
                   std::uint64_t seed) {
    if (classes < 2 || n < static_cast<std::size_t>(classes)) {
        throw std::invalid_argument("blobs need >= 2 classes and n >= classes");
    }
    std::mt19937_64 gen(seed);
    Dataset ds;
    ds.class_count = classes;
    ds.features = Tensor({n, dims});
    ds.labels.resize(n);

    // class c centre: +/- separation along axis (c / 2) % dims
    auto centre = [&](int c, std::size_t j) {
        const std::size_t axis = static_cast<std::size_t>(c / 2) % dims;
        const double sign = (c % 2 == 0) ? 1.0 : -1.0;
        return j == axis ? sign * separation : 0.0;
    };

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    shuffle_indices(order, gen);
    for (std::size_t i = 0; i < n; ++i) {
        const int cls = static_cast<int>(i % static_cast<std::size_t>(classes));
        const std::size_t row = order[i];
        ds.labels[row] = cls;
        for (std::size_t j = 0; j < dims; ++j) {
            ds.features.v[row * dims + j] = centre(cls, j) + rng::normal01(gen);
        }
    }
    return ds;
}

Dataset make_moons(std::size_t n, std::uint64_t seed, double noise) {
    if (n < 2) throw std::invalid_argument("moons need n >= 2");
    std::mt19937_64 gen(seed);
    Dataset ds;
    ds.class_count = 2;
    ds.features = Tensor({n, 2});
    ds.labels.resize(n);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    shuffle_indices(order, gen);
    for (std::size_t i = 0; i < n; ++i) {
        const int cls = static_cast<int>(i % 2);
        const double t = rng::uniform(gen, 0.0, kTwoPi / 2.0);
        double x, y;
        if (cls == 0) {
            x = std::cos(t);
            y = std::sin(t);
        } else {
            x = 1.0 - std::cos(t);
            y = 0.5 - std::sin(t);
        }
        const std::size_t row = order[i];
        ds.labels[row] = cls;
        ds.features.v[row * 2] = x + noise * rng::normal01(gen);
        ds.features.v[row * 2 + 1] = y + noise * rng::normal01(gen);
    }
    return ds;
}

namespace {

void draw_shape(double* img, int cls, std::mt19937_64& gen) {
    const int cx = 13 + static_cast<int>(gen() % 3);
    const int cy = 13 + static_cast<int>(gen() % 3);
    const double intensity = rng::uniform(gen, 0.7, 1.0);
    auto put = [&](int y, int x) {
        if (y >= 0 && y < 28 && x >= 0 && x < 28) {
            const double v = intensity + 0.1 * rng::normal01(gen);
            img[y * 28 + x] = std::clamp(v, 0.05, 1.0);
        }
    };
    switch (cls % 4) {
        case 0: {  // filled disk
            const int r = 5 + static_cast<int>(gen() % 4);
            for (int y = -r; y <= r; ++y) {
                for (int x = -r; x <= r; ++x) {
                    if (x * x + y * y <= r * r) put(cy + y, cx + x);
                }
            }
            break;
        }
        case 1: {  // hollow square
            const int h = 5 + static_cast<int>(gen() % 4);
            for (int t = -h; t <= h; ++t) {
                put(cy - h, cx + t);
                put(cy + h, cx + t);
                put(cy + t, cx - h);
                put(cy + t, cx + h);
            }
            break;
        }
        case 2: {  // cross
            const int h = 6 + static_cast<int>(gen() % 4);
            for (int t = -h; t <= h; ++t) {
                for (int w = -1; w <= 1; ++w) {
                    put(cy + t, cx + w);
                    put(cy + w, cx + t);
                }
            }
            break;
        }
        default: {  // diagonal stripes
            const int gap = 4 + static_cast<int>(gen() % 3);
            for (int y = 2; y < 26; ++y) {
                for (int x = 2; x < 26; ++x) {
                    if ((x + y) % gap == 0) put(y, x);
                }
            }
            break;
        }
    }
}

}  // namespace

Dataset make_shape_images(std::size_t n, int classes, std::uint64_t seed) {
    if (classes < 2 || classes > 4 || n < static_cast<std::size_t>(classes)) {
        throw std::invalid_argument("shape images support 2..4 classes and n >= classes");
    }
    std::mt19937_64 gen(seed);
    Dataset ds;
    ds.class_count = classes;
    ds.features = Tensor({n, 1, 28, 28});
    ds.labels.resize(n);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    shuffle_indices(order, gen);
    for (std::size_t i = 0; i < n; ++i) {
        const int cls = static_cast<int>(i % static_cast<std::size_t>(classes));
        const std::size_t row = order[i];
        ds.labels[row] = cls;
        draw_shape(ds.features.v.data() + row * 28 * 28, cls, gen);
    }
    return ds;
}

Dataset min_max_normalize(const Dataset& dataset) {
    if (dataset.is_image()) return dataset;  // image pixels are already in [0, 1]
    const std::size_t n = dataset.size();
    const std::size_t d = dataset.feature_dim();
    Dataset out = dataset;
    for (std::size_t j = 0; j < d; ++j) {
        double lo = dataset.features.v[j], hi = dataset.features.v[j];
        for (std::size_t i = 1; i < n; ++i) {
            lo = std::min(lo, dataset.features.v[i * d + j]);
            hi = std::max(hi, dataset.features.v[i * d + j]);
        }
        const double range = hi - lo;
        for (std::size_t i = 0; i < n; ++i) {
            auto& v = out.features.v[i * d + j];
            v = range == 0.0 ? 0.0 : (v - lo) / range;
        }
    }
    return out;
}

}  // namespace hqsl::dataio

#include "hqsl/neural/layers.hpp"

#include <cmath>
#include <stdexcept>

#include "hqsl/common/rng.hpp"

namespace hqsl::neural {

namespace {

void require_forward(bool have_input, const char* what) {
    if (!have_input) {
        throw std::logic_error(std::string(what) + ": backward called before forward");
    }
}

void require_shape(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// Weights: uniform(-sqrt(1/fan_in), +sqrt(1/fan_in)). Biases: the positive
// half of that range. Zero or sign-symmetric biases let the narrow stacked
// ReLU layers start (or collapse) wholesale dead on small nonnegative
// activations; a positive bias keeps every unit initially responsive.
void init_uniform(std::vector<double>& w, std::size_t fan_in, std::mt19937_64& gen) {
    const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
    for (auto& x : w) x = rng::uniform(gen, -bound, bound);
}

void init_bias(std::vector<double>& b, std::size_t fan_in, std::mt19937_64& gen) {
    const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
    for (auto& x : b) x = rng::uniform(gen, 0.0, bound);
}

}  // namespace

std::size_t param_count(Layer& layer) {
    std::size_t n = 0;
    for (const auto& p : layer.params()) n += numel(p.shape);
    return n;
}

// ---------------------------------------------------------------- Dense

Dense::Dense(std::size_t in, std::size_t out, std::mt19937_64& init_rng)
    : in_(in), out_(out), w_(in * out), b_(out, 0.0), dw_(in * out, 0.0), db_(out, 0.0) {
    init_uniform(w_, in_, init_rng);
    init_bias(b_, in_, init_rng);
}

Tensor Dense::forward(const Tensor& x, bool) {
    require_shape(x.rank() == 2 && x.dim(1) == in_,
                  "dense expects " + shape_str({0, in_}) + ", got " + shape_str(x.shape));
    cached_x_ = x;
    have_input_ = true;
    const std::size_t n = x.batch();
    Tensor y({n, out_});
    for (std::size_t s = 0; s < n; ++s) {
        const double* xi = x.v.data() + s * in_;
        double* yi = y.v.data() + s * out_;
        for (std::size_t o = 0; o < out_; ++o) {
            double acc = b_[o];
            const double* wo = w_.data() + o * in_;
            for (std::size_t i = 0; i < in_; ++i) acc += wo[i] * xi[i];
            yi[o] = acc;
        }
    }
    return y;
}

Tensor Dense::backward(const Tensor& g) {
    require_forward(have_input_, "dense");
    const std::size_t n = cached_x_.batch();
    require_shape(g.rank() == 2 && g.batch() == n && g.dim(1) == out_,
                  "dense backward shape mismatch");
    Tensor gin({n, in_});
    for (std::size_t s = 0; s < n; ++s) {
        const double* xi = cached_x_.v.data() + s * in_;
        const double* gi = g.v.data() + s * out_;
        double* out = gin.v.data() + s * in_;
        for (std::size_t o = 0; o < out_; ++o) {
            const double go = gi[o];
            db_[o] += go;
            double* dwo = dw_.data() + o * in_;
            const double* wo = w_.data() + o * in_;
            for (std::size_t i = 0; i < in_; ++i) {
                dwo[i] += go * xi[i];
                out[i] += go * wo[i];
            }
        }
    }
    return gin;
}

std::vector<ParamRef> Dense::params() {
    return {{"w", {out_, in_}, &w_, &dw_}, {"b", {out_}, &b_, &db_}};
}

// ---------------------------------------------------------------- Relu / Sigmoid

Tensor Relu::forward(const Tensor& x, bool) {
    cached_x_ = x;
    have_input_ = true;
    Tensor y = x;
    for (auto& v : y.v) v = v > 0.0 ? v : 0.0;
    return y;
}

Tensor Relu::backward(const Tensor& g) {
    require_forward(have_input_, "relu");
    Tensor gin = g;
    for (std::size_t i = 0; i < gin.size(); ++i) {
        if (cached_x_[i] <= 0.0) gin[i] = 0.0;
    }
    return gin;
}

Tensor Sigmoid::forward(const Tensor& x, bool) {
    Tensor y = x;
    for (auto& v : y.v) v = 1.0 / (1.0 + std::exp(-v));
    cached_y_ = y;
    have_input_ = true;
    return y;
}

Tensor Sigmoid::backward(const Tensor& g) {
    require_forward(have_input_, "sigmoid");
    Tensor gin = g;
    for (std::size_t i = 0; i < gin.size(); ++i) {
        const double y = cached_y_[i];
        gin[i] *= y * (1.0 - y);
    }
    return gin;
}

// ---------------------------------------------------------------- Dropout

Dropout::Dropout(double p, std::uint64_t seed) : p_(p), rng_(seed) {
    if (p < 0.0 || p >= 1.0) throw std::invalid_argument("dropout rate must be in [0, 1)");
}

Tensor Dropout::forward(const Tensor& x, bool training) {
    have_input_ = true;
    if (!training || p_ == 0.0) {
        mask_.assign(x.size(), 1.0);
        return x;
    }
    const double keep = 1.0 - p_;
    mask_.resize(x.size());
    Tensor y = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mask_[i] = rng::uniform01(rng_) < keep ? 1.0 / keep : 0.0;
        y[i] *= mask_[i];
    }
    return y;
}

Tensor Dropout::backward(const Tensor& g) {
    require_forward(have_input_, "dropout");
    Tensor gin = g;
    for (std::size_t i = 0; i < gin.size(); ++i) gin[i] *= mask_[i];
    return gin;
}

// ---------------------------------------------------------------- Flatten / Reshape

Tensor Flatten::forward(const Tensor& x, bool) {
    cached_shape_ = x.shape;
    have_input_ = true;
    return x.reshaped({x.batch(), x.per_sample()});
}

Tensor Flatten::backward(const Tensor& g) {
    require_forward(have_input_, "flatten");
    return g.reshaped(cached_shape_);
}

Tensor Reshape::forward(const Tensor& x, bool) {
    cached_shape_ = x.shape;
    have_input_ = true;
    Shape s{x.batch()};
    s.insert(s.end(), target_.begin(), target_.end());
    return x.reshaped(std::move(s));
}

Tensor Reshape::backward(const Tensor& g) {
    require_forward(have_input_, "reshape");
    return g.reshaped(cached_shape_);
}

// ---------------------------------------------------------------- Conv2D

Conv2D::Conv2D(std::size_t in_ch, std::size_t out_ch, std::size_t kernel,
               std::size_t padding, std::mt19937_64& init_rng)
    : ic_(in_ch), oc_(out_ch), k_(kernel), pad_(padding),
      w_(out_ch * in_ch * kernel * kernel), b_(out_ch, 0.0),
      dw_(w_.size(), 0.0), db_(out_ch, 0.0) {
    init_uniform(w_, ic_ * k_ * k_, init_rng);
    init_bias(b_, ic_ * k_ * k_, init_rng);
}

Tensor Conv2D::forward(const Tensor& x, bool) {
    require_shape(x.rank() == 4 && x.dim(1) == ic_, "conv2d expects (N, " +
                  std::to_string(ic_) + ", H, W), got " + shape_str(x.shape));
    cached_x_ = x;
    have_input_ = true;
    const std::size_t n = x.dim(0), h = x.dim(2), w = x.dim(3);
    require_shape(h + 2 * pad_ + 1 > k_ && w + 2 * pad_ + 1 > k_, "conv2d kernel too large");
    const std::size_t oh = h + 2 * pad_ - k_ + 1, ow = w + 2 * pad_ - k_ + 1;
    Tensor y({n, oc_, oh, ow});
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t oc = 0; oc < oc_; ++oc) {
            double* yp = y.v.data() + ((s * oc_ + oc) * oh) * ow;
            for (std::size_t i = 0; i < oh * ow; ++i) yp[i] = b_[oc];
            for (std::size_t ic = 0; ic < ic_; ++ic) {
                const double* xp = x.v.data() + ((s * ic_ + ic) * h) * w;
                const double* wp = w_.data() + ((oc * ic_ + ic) * k_) * k_;
                for (std::size_t oy = 0; oy < oh; ++oy) {
                    for (std::size_t ox = 0; ox < ow; ++ox) {
                        double acc = 0.0;
                        for (std::size_t ky = 0; ky < k_; ++ky) {
                            const std::ptrdiff_t iy =
                                static_cast<std::ptrdiff_t>(oy + ky) -
                                static_cast<std::ptrdiff_t>(pad_);
                            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h)) continue;
                            for (std::size_t kx = 0; kx < k_; ++kx) {
                                const std::ptrdiff_t ix =
                                    static_cast<std::ptrdiff_t>(ox + kx) -
                                    static_cast<std::ptrdiff_t>(pad_);
                                if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(w)) continue;
                                acc += xp[iy * static_cast<std::ptrdiff_t>(w) + ix] *
                                       wp[ky * k_ + kx];
                            }
                        }
                        yp[oy * ow + ox] += acc;
                    }
                }
            }
        }
    }
    return y;
}

Tensor Conv2D::backward(const Tensor& g) {
    require_forward(have_input_, "conv2d");
    const std::size_t n = cached_x_.dim(0), h = cached_x_.dim(2), w = cached_x_.dim(3);
    const std::size_t oh = h + 2 * pad_ - k_ + 1, ow = w + 2 * pad_ - k_ + 1;
    require_shape(g.rank() == 4 && g.dim(0) == n && g.dim(1) == oc_ && g.dim(2) == oh &&
                      g.dim(3) == ow,
                  "conv2d backward shape mismatch");
    Tensor gin(cached_x_.shape);
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t oc = 0; oc < oc_; ++oc) {
            const double* gp = g.v.data() + ((s * oc_ + oc) * oh) * ow;
            for (std::size_t i = 0; i < oh * ow; ++i) db_[oc] += gp[i];
            for (std::size_t ic = 0; ic < ic_; ++ic) {
                const double* xp = cached_x_.v.data() + ((s * ic_ + ic) * h) * w;
                double* gxp = gin.v.data() + ((s * ic_ + ic) * h) * w;
                const double* wp = w_.data() + ((oc * ic_ + ic) * k_) * k_;
                double* dwp = dw_.data() + ((oc * ic_ + ic) * k_) * k_;
                for (std::size_t oy = 0; oy < oh; ++oy) {
                    for (std::size_t ox = 0; ox < ow; ++ox) {
                        const double go = gp[oy * ow + ox];
                        if (go == 0.0) continue;
                        for (std::size_t ky = 0; ky < k_; ++ky) {
                            const std::ptrdiff_t iy =
                                static_cast<std::ptrdiff_t>(oy + ky) -
                                static_cast<std::ptrdiff_t>(pad_);
                            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h)) continue;
                            for (std::size_t kx = 0; kx < k_; ++kx) {
                                const std::ptrdiff_t ix =
                                    static_cast<std::ptrdiff_t>(ox + kx) -
                                    static_cast<std::ptrdiff_t>(pad_);
                                if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(w)) continue;
                                const std::size_t xi =
                                    static_cast<std::size_t>(iy) * w +
                                    static_cast<std::size_t>(ix);
                                dwp[ky * k_ + kx] += go * xp[xi];
                                gxp[xi] += go * wp[ky * k_ + kx];
                            }
                        }
                    }
                }
            }
        }
    }
    return gin;
}

std::vector<ParamRef> Conv2D::params() {
    return {{"w", {oc_, ic_, k_, k_}, &w_, &dw_}, {"b", {oc_}, &b_, &db_}};
}

// ---------------------------------------------------------------- MaxPool2D

Tensor MaxPool2D::forward(const Tensor& x, bool) {
    require_shape(x.rank() == 4 && x.dim(2) % 2 == 0 && x.dim(3) % 2 == 0,
                  "maxpool2d expects (N, C, 2h, 2w), got " + shape_str(x.shape));
    cached_shape_ = x.shape;
    have_input_ = true;
    const std::size_t n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    const std::size_t oh = h / 2, ow = w / 2;
    Tensor y({n, c, oh, ow});
    argmax_.assign(y.size(), 0);
    for (std::size_t sc = 0; sc < n * c; ++sc) {
        const double* xp = x.v.data() + sc * h * w;
        double* yp = y.v.data() + sc * oh * ow;
        std::size_t* ap = argmax_.data() + sc * oh * ow;
        for (std::size_t oy = 0; oy < oh; ++oy) {
            for (std::size_t ox = 0; ox < ow; ++ox) {
                std::size_t best = (2 * oy) * w + 2 * ox;
                for (std::size_t ky = 0; ky < 2; ++ky) {
                    for (std::size_t kx = 0; kx < 2; ++kx) {
                        const std::size_t idx = (2 * oy + ky) * w + 2 * ox + kx;
                        if (xp[idx] > xp[best]) best = idx;
                    }
                }
                yp[oy * ow + ox] = xp[best];
                ap[oy * ow + ox] = sc * h * w + best;
            }
        }
    }
    return y;
}

Tensor MaxPool2D::backward(const Tensor& g) {
    require_forward(have_input_, "maxpool2d");
    Tensor gin(cached_shape_);
    require_shape(g.size() == argmax_.size(), "maxpool2d backward shape mismatch");
    for (std::size_t i = 0; i < g.size(); ++i) gin[argmax_[i]] += g[i];
    return gin;
}

// ---------------------------------------------------------------- BatchNorm

BatchNorm::BatchNorm(std::size_t features, double momentum, double eps)
    : f_(features), momentum_(momentum), eps_(eps), gamma_(features, 1.0),
      beta_(features, 0.0), dgamma_(features, 0.0), dbeta_(features, 0.0),
      run_mean_(features, 0.0), run_var_(features, 1.0) {}

Tensor BatchNorm::forward(const Tensor& x, bool training) {
    require_shape((x.rank() == 2 && x.dim(1) == f_) || (x.rank() == 4 && x.dim(1) == f_),
                  "batchnorm expects feature/channel dim " + std::to_string(f_) +
                      ", got " + shape_str(x.shape));
    have_input_ = true;
    const std::size_t n = x.dim(0);
    const std::size_t spatial = x.rank() == 4 ? x.dim(2) * x.dim(3) : 1;
    const std::size_t group = n * spatial;  // elements normalized per feature
    cached_group_ = group;

    std::vector<double> mean(f_, 0.0), var(f_, 0.0);
    if (training) {
        for (std::size_t s = 0; s < n; ++s) {
            for (std::size_t c = 0; c < f_; ++c) {
                const double* xp = x.v.data() + (s * f_ + c) * spatial;
                for (std::size_t i = 0; i < spatial; ++i) mean[c] += xp[i];
            }
        }
        for (auto& m : mean) m /= static_cast<double>(group);
        for (std::size_t s = 0; s < n; ++s) {
            for (std::size_t c = 0; c < f_; ++c) {
                const double* xp = x.v.data() + (s * f_ + c) * spatial;
                for (std::size_t i = 0; i < spatial; ++i) {
                    const double d = xp[i] - mean[c];
                    var[c] += d * d;
                }
            }
        }
        for (auto& v : var) v /= static_cast<double>(group);
        for (std::size_t c = 0; c < f_; ++c) {
            run_mean_[c] = (1.0 - momentum_) * run_mean_[c] + momentum_ * mean[c];
            run_var_[c] = (1.0 - momentum_) * run_var_[c] + momentum_ * var[c];
        }
    } else {
        mean = run_mean_;
        var = run_var_;
    }

    cached_inv_std_.assign(f_, 0.0);
    for (std::size_t c = 0; c < f_; ++c) cached_inv_std_[c] = 1.0 / std::sqrt(var[c] + eps_);

    Tensor y(x.shape);
    cached_xhat_ = Tensor(x.shape);
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t c = 0; c < f_; ++c) {
            const double* xp = x.v.data() + (s * f_ + c) * spatial;
            double* hp = cached_xhat_.v.data() + (s * f_ + c) * spatial;
            double* yp = y.v.data() + (s * f_ + c) * spatial;
            for (std::size_t i = 0; i < spatial; ++i) {
                hp[i] = (xp[i] - mean[c]) * cached_inv_std_[c];
                yp[i] = gamma_[c] * hp[i] + beta_[c];
            }
        }
    }
    return y;
}

Tensor BatchNorm::backward(const Tensor& g) {
    require_forward(have_input_, "batchnorm");
    require_shape(g.shape == cached_xhat_.shape, "batchnorm backward shape mismatch");
    const std::size_t n = g.dim(0);
    const std::size_t spatial = g.rank() == 4 ? g.dim(2) * g.dim(3) : 1;
    const double m = static_cast<double>(cached_group_);

    std::vector<double> sum_g(f_, 0.0), sum_gh(f_, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t c = 0; c < f_; ++c) {
            const double* gp = g.v.data() + (s * f_ + c) * spatial;
            const double* hp = cached_xhat_.v.data() + (s * f_ + c) * spatial;
            for (std::size_t i = 0; i < spatial; ++i) {
                sum_g[c] += gp[i];
                sum_gh[c] += gp[i] * hp[i];
            }
        }
    }
    for (std::size_t c = 0; c < f_; ++c) {
        dbeta_[c] += sum_g[c];
        dgamma_[c] += sum_gh[c];
    }

    Tensor gin(g.shape);
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t c = 0; c < f_; ++c) {
            const double* gp = g.v.data() + (s * f_ + c) * spatial;
            const double* hp = cached_xhat_.v.data() + (s * f_ + c) * spatial;
            double* op = gin.v.data() + (s * f_ + c) * spatial;
            const double scale = gamma_[c] * cached_inv_std_[c];
            for (std::size_t i = 0; i < spatial; ++i) {
                op[i] = scale * (gp[i] - sum_g[c] / m - hp[i] * sum_gh[c] / m);
            }
        }
    }
    return gin;
}

std::vector<ParamRef> BatchNorm::params() {
    return {{"gamma", {f_}, &gamma_, &dgamma_}, {"beta", {f_}, &beta_, &dbeta_}};
}

std::vector<ParamRef> BatchNorm::buffers() {
    return {{"run_mean", {f_}, &run_mean_, nullptr},
            {"run_var", {f_}, &run_var_, nullptr}};
}

// ---------------------------------------------------------------- Upsample2D

Tensor Upsample2D::forward(const Tensor& x, bool) {
    require_shape(x.rank() == 4, "upsample2d expects (N, C, H, W)");
    cached_shape_ = x.shape;
    have_input_ = true;
    const std::size_t n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    Tensor y({n, c, h * f_, w * f_});
    for (std::size_t sc = 0; sc < n * c; ++sc) {
        const double* xp = x.v.data() + sc * h * w;
        double* yp = y.v.data() + sc * h * f_ * w * f_;
        for (std::size_t oy = 0; oy < h * f_; ++oy) {
            for (std::size_t ox = 0; ox < w * f_; ++ox) {
                yp[oy * w * f_ + ox] = xp[(oy / f_) * w + ox / f_];
            }
        }
    }
    return y;
}

Tensor Upsample2D::backward(const Tensor& g) {
    require_forward(have_input_, "upsample2d");
    const std::size_t n = cached_shape_[0], c = cached_shape_[1], h = cached_shape_[2],
                      w = cached_shape_[3];
    require_shape(g.rank() == 4 && g.dim(2) == h * f_ && g.dim(3) == w * f_,
                  "upsample2d backward shape mismatch");
    Tensor gin(cached_shape_);
    for (std::size_t sc = 0; sc < n * c; ++sc) {
        const double* gp = g.v.data() + sc * h * f_ * w * f_;
        double* op = gin.v.data() + sc * h * w;
        for (std::size_t oy = 0; oy < h * f_; ++oy) {
            for (std::size_t ox = 0; ox < w * f_; ++ox) {
                op[(oy / f_) * w + ox / f_] += gp[oy * w * f_ + ox];
            }
        }
    }
    return gin;
}

// ---------------------------------------------------------------- TransposeConv2D

TransposeConv2D::TransposeConv2D(std::size_t in_ch, std::size_t out_ch, std::size_t kernel,
                                 std::size_t stride, std::size_t padding,
                                 std::mt19937_64& init_rng)
    : ic_(in_ch), oc_(out_ch), k_(kernel), stride_(stride), pad_(padding),
      w_(in_ch * out_ch * kernel * kernel), b_(out_ch, 0.0),
      dw_(w_.size(), 0.0), db_(out_ch, 0.0) {
    init_uniform(w_, ic_ * k_ * k_, init_rng);
    init_bias(b_, ic_ * k_ * k_, init_rng);
}

Tensor TransposeConv2D::forward(const Tensor& x, bool) {
    require_shape(x.rank() == 4 && x.dim(1) == ic_, "transposeconv2d expects (N, " +
                  std::to_string(ic_) + ", H, W), got " + shape_str(x.shape));
    cached_x_ = x;
    have_input_ = true;
    const std::size_t n = x.dim(0), h = x.dim(2), w = x.dim(3);
    const std::size_t oh = (h - 1) * stride_ + k_ - 2 * pad_;
    const std::size_t ow = (w - 1) * stride_ + k_ - 2 * pad_;
    Tensor y({n, oc_, oh, ow});
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t oc = 0; oc < oc_; ++oc) {
            double* yp = y.v.data() + ((s * oc_ + oc) * oh) * ow;
            for (std::size_t i = 0; i < oh * ow; ++i) yp[i] = b_[oc];
        }
        for (std::size_t ic = 0; ic < ic_; ++ic) {
            const double* xp = x.v.data() + ((s * ic_ + ic) * h) * w;
            for (std::size_t oc = 0; oc < oc_; ++oc) {
                const double* wp = w_.data() + ((ic * oc_ + oc) * k_) * k_;
                double* yp = y.v.data() + ((s * oc_ + oc) * oh) * ow;
                for (std::size_t iy = 0; iy < h; ++iy) {
                    for (std::size_t ix = 0; ix < w; ++ix) {
                        const double xv = xp[iy * w + ix];
                        if (xv == 0.0) continue;
                        for (std::size_t ky = 0; ky < k_; ++ky) {
                            const std::ptrdiff_t oy =
                                static_cast<std::ptrdiff_t>(iy * stride_ + ky) -
                                static_cast<std::ptrdiff_t>(pad_);
                            if (oy < 0 || oy >= static_cast<std::ptrdiff_t>(oh)) continue;
                            for (std::size_t kx = 0; kx < k_; ++kx) {
                                const std::ptrdiff_t ox =
                                    static_cast<std::ptrdiff_t>(ix * stride_ + kx) -
                                    static_cast<std::ptrdiff_t>(pad_);
                                if (ox < 0 || ox >= static_cast<std::ptrdiff_t>(ow)) continue;
                                yp[oy * static_cast<std::ptrdiff_t>(ow) + ox] +=
                                    xv * wp[ky * k_ + kx];
                            }
                        }
                    }
                }
            }
        }
    }
    return y;
}

Tensor TransposeConv2D::backward(const Tensor& g) {
    require_forward(have_input_, "transposeconv2d");
    const std::size_t n = cached_x_.dim(0), h = cached_x_.dim(2), w = cached_x_.dim(3);
    const std::size_t oh = (h - 1) * stride_ + k_ - 2 * pad_;
    const std::size_t ow = (w - 1) * stride_ + k_ - 2 * pad_;
    require_shape(g.rank() == 4 && g.dim(0) == n && g.dim(1) == oc_ && g.dim(2) == oh &&
                      g.dim(3) == ow,
                  "transposeconv2d backward shape mismatch");
    Tensor gin(cached_x_.shape);
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t oc = 0; oc < oc_; ++oc) {
            const double* gp = g.v.data() + ((s * oc_ + oc) * oh) * ow;
            for (std::size_t i = 0; i < oh * ow; ++i) db_[oc] += gp[i];
        }
        for (std::size_t ic = 0; ic < ic_; ++ic) {
            const double* xp = cached_x_.v.data() + ((s * ic_ + ic) * h) * w;
            double* gxp = gin.v.data() + ((s * ic_ + ic) * h) * w;
            for (std::size_t oc = 0; oc < oc_; ++oc) {
                const double* wp = w_.data() + ((ic * oc_ + oc) * k_) * k_;
                double* dwp = dw_.data() + ((ic * oc_ + oc) * k_) * k_;
                const double* gp = g.v.data() + ((s * oc_ + oc) * oh) * ow;
                for (std::size_t iy = 0; iy < h; ++iy) {
                    for (std::size_t ix = 0; ix < w; ++ix) {
                        const double xv = xp[iy * w + ix];
                        double acc = 0.0;
                        for (std::size_t ky = 0; ky < k_; ++ky) {
                            const std::ptrdiff_t oy =
                                static_cast<std::ptrdiff_t>(iy * stride_ + ky) -
                                static_cast<std::ptrdiff_t>(pad_);
                            if (oy < 0 || oy >= static_cast<std::ptrdiff_t>(oh)) continue;
                            for (std::size_t kx = 0; kx < k_; ++kx) {
                                const std::ptrdiff_t ox =
                                    static_cast<std::ptrdiff_t>(ix * stride_ + kx) -
                                    static_cast<std::ptrdiff_t>(pad_);
                                if (ox < 0 || ox >= static_cast<std::ptrdiff_t>(ow)) continue;
                                const double go =
                                    gp[oy * static_cast<std::ptrdiff_t>(ow) + ox];
                                acc += go * wp[ky * k_ + kx];
                                dwp[ky * k_ + kx] += go * xv;
                            }
                        }
                        gxp[iy * w + ix] += acc;
                    }
                }
            }
        }
    }
    return gin;
}

std::vector<ParamRef> TransposeConv2D::params() {
    return {{"w", {ic_, oc_, k_, k_}, &w_, &dw_}, {"b", {oc_}, &b_, &db_}};
}

// ---------------------------------------------------------------- Sequential / Residual

Sequential& Sequential::add(std::unique_ptr<Layer> layer) {
    layers_.push_back(std::move(layer));
    return *this;
}

Tensor Sequential::forward(const Tensor& x, bool training) {
    Tensor cur = x;
    for (auto& l : layers_) cur = l->forward(cur, training);
    return cur;
}

Tensor Sequential::backward(const Tensor& grad_out) {
    Tensor cur = grad_out;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
        cur = (*it)->backward(cur);
    }
    return cur;
}

namespace {
std::vector<ParamRef> prefixed(std::vector<ParamRef> refs, const std::string& prefix) {
    for (auto& r : refs) r.name = prefix + r.name;
    return refs;
}
}  // namespace

std::vector<ParamRef> Sequential::params() {
    std::vector<ParamRef> out;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        for (auto& r : prefixed(layers_[i]->params(), std::to_string(i) + ".")) {
            out.push_back(std::move(r));
        }
    }
    return out;
}

std::vector<ParamRef> Sequential::buffers() {
    std::vector<ParamRef> out;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        for (auto& r : prefixed(layers_[i]->buffers(), std::to_string(i) + ".")) {
            out.push_back(std::move(r));
        }
    }
    return out;
}

Tensor Residual::forward(const Tensor& x, bool training) {
    Tensor main = main_->forward(x, training);
    const Tensor skip = skip_->forward(x, training);
    if (main.shape != skip.shape) {
        throw std::invalid_argument("residual branches disagree: " + shape_str(main.shape) +
                                    " vs " + shape_str(skip.shape));
    }
    for (std::size_t i = 0; i < main.size(); ++i) main[i] += skip[i];
    return main;
}

Tensor Residual::backward(const Tensor& grad_out) {
    Tensor a = main_->backward(grad_out);
    const Tensor b = skip_->backward(grad_out);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

std::vector<ParamRef> Residual::params() {
    auto out = prefixed(main_->params(), "main.");
    for (auto& r : prefixed(skip_->params(), "skip.")) out.push_back(std::move(r));
    return out;
}

std::vector<ParamRef> Residual::buffers() {
    auto out = prefixed(main_->buffers(), "main.");
    for (auto& r : prefixed(skip_->buffers(), "skip.")) out.push_back(std::move(r));
    return out;
}

}  // namespace hqsl::neural

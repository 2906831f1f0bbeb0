#include "wavecomm/layers.hpp"

#include <cmath>

#include "wavecomm/errors.hpp"

namespace wavecomm::nn {

namespace {

// Floor/ceil division for possibly negative numerators, positive divisors.
// Used to precompute the valid output ranges of convolution loops so the
// inner loops run without per-element bounds checks.
inline int floor_div(int a, int b) { return (a >= 0) ? a / b : -((-a + b - 1) / b); }
inline int ceil_div(int a, int b) { return (a >= 0) ? (a + b - 1) / b : -((-a) / b); }

void kaiming_uniform(Tensor& w, int fan_in, Rng& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    double* d = w.data();
    for (std::size_t i = 0; i < w.size(); ++i) d[i] = rng.uniform(-bound, bound);
}

void require_input(const Tensor& x, int channels, const char* who) {
    if (x.rank() != 3) throw ShapeError(std::string(who) + ": expected rank-3 input");
    if (x.channels() != channels) {
        throw ShapeError(std::string(who) + ": expected " + std::to_string(channels) +
                         " input channels, got " + std::to_string(x.channels()));
    }
}

}  // namespace

Conv2d::Conv2d(int in_ch, int out_ch, int kernel, int stride, int pad, Rng& rng)
    : weight(Tensor({out_ch, in_ch, kernel, kernel})),
      bias(Tensor({out_ch})),
      in_ch_(in_ch),
      out_ch_(out_ch),
      k_(kernel),
      s_(stride),
      p_(pad) {
    if (in_ch < 1 || out_ch < 1 || kernel < 1 || stride < 1 || pad < 0) {
        throw ConfigError("conv2d: invalid geometry");
    }
    kaiming_uniform(weight.value, in_ch_ * k_ * k_, rng);
}

void Conv2d::zero_init() {
    weight.value.fill(0.0);
    bias.value.fill(0.0);
}

Tensor Conv2d::forward(const Tensor& x, LayerState& st, Mode mode) {
    require_input(x, in_ch_, "conv2d");
    const int H = x.height(), W = x.width();
    const int num = H + 2 * p_ - k_;
    if (num < 0 || num % s_ != 0 || (W + 2 * p_ - k_) < 0 || (W + 2 * p_ - k_) % s_ != 0) {
        throw ShapeError("conv2d: input " + std::to_string(H) + "x" + std::to_string(W) +
                         " incompatible with kernel " + std::to_string(k_) + " stride " +
                         std::to_string(s_) + " pad " + std::to_string(p_));
    }
    const int Ho = num / s_ + 1;
    const int Wo = (W + 2 * p_ - k_) / s_ + 1;

    Tensor out({out_ch_, Ho, Wo});
    for (int oc = 0; oc < out_ch_; ++oc) {
        const double b = bias.value[static_cast<std::size_t>(oc)];
        double* oy0 = out.data() + static_cast<std::size_t>(oc) * Ho * Wo;
        for (int i = 0; i < Ho * Wo; ++i) oy0[i] = b;
    }
    for (int oc = 0; oc < out_ch_; ++oc) {
        for (int ic = 0; ic < in_ch_; ++ic) {
            for (int ky = 0; ky < k_; ++ky) {
                const int oy_lo = std::max(0, ceil_div(p_ - ky, s_));
                const int oy_hi = std::min(Ho - 1, floor_div(H - 1 + p_ - ky, s_));
                for (int kx = 0; kx < k_; ++kx) {
                    const double w =
                        weight.value[((static_cast<std::size_t>(oc) * in_ch_ + ic) * k_ + ky) * k_ +
                                     kx];
                    if (w == 0.0) continue;
                    const int ox_lo = std::max(0, ceil_div(p_ - kx, s_));
                    const int ox_hi = std::min(Wo - 1, floor_div(W - 1 + p_ - kx, s_));
                    const int off = kx - p_;
                    for (int oy = oy_lo; oy <= oy_hi; ++oy) {
                        const int iy = oy * s_ - p_ + ky;
                        const double* xr = x.data() + (static_cast<std::size_t>(ic) * H + iy) * W;
                        double* orow = out.data() + (static_cast<std::size_t>(oc) * Ho + oy) * Wo;
                        for (int ox = ox_lo; ox <= ox_hi; ++ox) {
                            orow[ox] += w * xr[ox * s_ + off];
                        }
                    }
                }
            }
        }
    }
    st.saved.clear();
    st.saved.push_back(x);
    st.mode = mode;
    return out;
}

Tensor Conv2d::backward(const Tensor& gy, const LayerState& st) {
    const Tensor& x = st.saved.at(0);
    const int H = x.height(), W = x.width();
    const int Ho = gy.height(), Wo = gy.width();
    if (gy.channels() != out_ch_) throw ShapeError("conv2d backward: channel mismatch");

    Tensor gx(x.shape());
    for (int oc = 0; oc < out_ch_; ++oc) {
        const double* grow0 = gy.data() + static_cast<std::size_t>(oc) * Ho * Wo;
        double gb = 0.0;
        for (int i = 0; i < Ho * Wo; ++i) gb += grow0[i];
        bias.grad[static_cast<std::size_t>(oc)] += gb;

        for (int ic = 0; ic < in_ch_; ++ic) {
            for (int ky = 0; ky < k_; ++ky) {
                const int oy_lo = std::max(0, ceil_div(p_ - ky, s_));
                const int oy_hi = std::min(Ho - 1, floor_div(H - 1 + p_ - ky, s_));
                for (int kx = 0; kx < k_; ++kx) {
                    const std::size_t widx =
                        ((static_cast<std::size_t>(oc) * in_ch_ + ic) * k_ + ky) * k_ + kx;
                    const double w = weight.value[widx];
                    const int ox_lo = std::max(0, ceil_div(p_ - kx, s_));
                    const int ox_hi = std::min(Wo - 1, floor_div(W - 1 + p_ - kx, s_));
                    const int off = kx - p_;
                    double gw = 0.0;
                    for (int oy = oy_lo; oy <= oy_hi; ++oy) {
                        const int iy = oy * s_ - p_ + ky;
                        const double* xr = x.data() + (static_cast<std::size_t>(ic) * H + iy) * W;
                        double* gxr = gx.data() + (static_cast<std::size_t>(ic) * H + iy) * W;
                        const double* grow =
                            gy.data() + (static_cast<std::size_t>(oc) * Ho + oy) * Wo;
                        for (int ox = ox_lo; ox <= ox_hi; ++ox) {
                            const double g = grow[ox];
                            gw += g * xr[ox * s_ + off];
                            gxr[ox * s_ + off] += w * g;
                        }
                    }
                    weight.grad[widx] += gw;
                }
            }
        }
    }
    return gx;
}

ConvTranspose2d::ConvTranspose2d(int in_ch, int out_ch, int kernel, int stride, int pad, Rng& rng)
    : weight(Tensor({in_ch, out_ch, kernel, kernel})),
      bias(Tensor({out_ch})),
      in_ch_(in_ch),
      out_ch_(out_ch),
      k_(kernel),
      s_(stride),
      p_(pad) {
    if (in_ch < 1 || out_ch < 1 || kernel < 1 || stride < 1 || pad < 0) {
        throw ConfigError("conv_transpose2d: invalid geometry");
    }
    kaiming_uniform(weight.value, out_ch_ * k_ * k_, rng);
}

Tensor ConvTranspose2d::forward(const Tensor& x, LayerState& st, Mode mode) {
    require_input(x, in_ch_, "conv_transpose2d");
    const int H = x.height(), W = x.width();
    const int Ho = (H - 1) * s_ - 2 * p_ + k_;
    const int Wo = (W - 1) * s_ - 2 * p_ + k_;
    if (Ho < 1 || Wo < 1) throw ShapeError("conv_transpose2d: degenerate output");

    Tensor out({out_ch_, Ho, Wo});
    for (int oc = 0; oc < out_ch_; ++oc) {
        const double b = bias.value[static_cast<std::size_t>(oc)];
        double* o0 = out.data() + static_cast<std::size_t>(oc) * Ho * Wo;
        for (int i = 0; i < Ho * Wo; ++i) o0[i] = b;
    }
    for (int ic = 0; ic < in_ch_; ++ic) {
        for (int oc = 0; oc < out_ch_; ++oc) {
            for (int ky = 0; ky < k_; ++ky) {
                const int iy_lo = std::max(0, ceil_div(p_ - ky, s_));
                const int iy_hi = std::min(H - 1, floor_div(Ho - 1 + p_ - ky, s_));
                for (int kx = 0; kx < k_; ++kx) {
                    const double w =
                        weight.value[((static_cast<std::size_t>(ic) * out_ch_ + oc) * k_ + ky) *
                                         k_ +
                                     kx];
                    if (w == 0.0) continue;
                    const int ix_lo = std::max(0, ceil_div(p_ - kx, s_));
                    const int ix_hi = std::min(W - 1, floor_div(Wo - 1 + p_ - kx, s_));
                    const int off = kx - p_;
                    for (int iy = iy_lo; iy <= iy_hi; ++iy) {
                        const int oy = iy * s_ - p_ + ky;
                        const double* xr = x.data() + (static_cast<std::size_t>(ic) * H + iy) * W;
                        double* orow = out.data() + (static_cast<std::size_t>(oc) * Ho + oy) * Wo;
                        for (int ix = ix_lo; ix <= ix_hi; ++ix) {
                            orow[ix * s_ + off] += w * xr[ix];
                        }
                    }
                }
            }
        }
    }
    st.saved.clear();
    st.saved.push_back(x);
    st.mode = mode;
    return out;
}

Tensor ConvTranspose2d::backward(const Tensor& gy, const LayerState& st) {
    const Tensor& x = st.saved.at(0);
    const int H = x.height(), W = x.width();
    const int Ho = gy.height(), Wo = gy.width();
    if (gy.channels() != out_ch_) throw ShapeError("conv_transpose2d backward: channel mismatch");

    Tensor gx(x.shape());
    for (int oc = 0; oc < out_ch_; ++oc) {
        const double* g0 = gy.data() + static_cast<std::size_t>(oc) * Ho * Wo;
        double gb = 0.0;
        for (int i = 0; i < Ho * Wo; ++i) gb += g0[i];
        bias.grad[static_cast<std::size_t>(oc)] += gb;
    }
    for (int ic = 0; ic < in_ch_; ++ic) {
        for (int oc = 0; oc < out_ch_; ++oc) {
            for (int ky = 0; ky < k_; ++ky) {
                const int iy_lo = std::max(0, ceil_div(p_ - ky, s_));
                const int iy_hi = std::min(H - 1, floor_div(Ho - 1 + p_ - ky, s_));
                for (int kx = 0; kx < k_; ++kx) {
                    const std::size_t widx =
                        ((static_cast<std::size_t>(ic) * out_ch_ + oc) * k_ + ky) * k_ + kx;
                    const double w = weight.value[widx];
                    const int ix_lo = std::max(0, ceil_div(p_ - kx, s_));
                    const int ix_hi = std::min(W - 1, floor_div(Wo - 1 + p_ - kx, s_));
                    const int off = kx - p_;
                    double gw = 0.0;
                    for (int iy = iy_lo; iy <= iy_hi; ++iy) {
                        const int oy = iy * s_ - p_ + ky;
                        const double* xr = x.data() + (static_cast<std::size_t>(ic) * H + iy) * W;
                        double* gxr = gx.data() + (static_cast<std::size_t>(ic) * H + iy) * W;
                        const double* grow =
                            gy.data() + (static_cast<std::size_t>(oc) * Ho + oy) * Wo;
                        for (int ix = ix_lo; ix <= ix_hi; ++ix) {
                            const double g = grow[ix * s_ + off];
                            gw += g * xr[ix];
                            gxr[ix] += w * g;
                        }
                    }
                    weight.grad[widx] += gw;
                }
            }
        }
    }
    return gx;
}

BatchNorm2d::BatchNorm2d(int channels, double eps, double momentum)
    : gamma(Tensor({channels})),
      beta(Tensor({channels})),
      running_mean({channels}),
      running_var({channels}),
      channels_(channels),
      eps_(eps),
      momentum_(momentum) {
    gamma.value.fill(1.0);
    running_var.fill(1.0);
}

Tensor BatchNorm2d::forward(const Tensor& x, LayerState& st, Mode mode) {
    require_input(x, channels_, "batchnorm2d");
    const int H = x.height(), W = x.width();
    const std::size_t N = static_cast<std::size_t>(H) * W;
    if (mode == Mode::Train && N < 2) {
        throw NumericError("batchnorm2d: train mode needs >= 2 elements per channel");
    }

    Tensor out(x.shape());
    Tensor xhat(x.shape());
    Tensor inv_std({channels_});

    for (int c = 0; c < channels_; ++c) {
        const double* xc = x.data() + static_cast<std::size_t>(c) * N;
        double mean, var;
        if (mode == Mode::Train) {
            double s = 0.0;
            for (std::size_t i = 0; i < N; ++i) s += xc[i];
            mean = s / static_cast<double>(N);
            double v = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                const double d = xc[i] - mean;
                v += d * d;
            }
            var = v / static_cast<double>(N);
            running_mean[static_cast<std::size_t>(c)] =
                (1.0 - momentum_) * running_mean[static_cast<std::size_t>(c)] + momentum_ * mean;
            running_var[static_cast<std::size_t>(c)] =
                (1.0 - momentum_) * running_var[static_cast<std::size_t>(c)] + momentum_ * var;
        } else {
            mean = running_mean[static_cast<std::size_t>(c)];
            var = running_var[static_cast<std::size_t>(c)];
        }
        const double is = 1.0 / std::sqrt(var + eps_);
        inv_std[static_cast<std::size_t>(c)] = is;
        const double g = gamma.value[static_cast<std::size_t>(c)];
        const double b = beta.value[static_cast<std::size_t>(c)];
        double* hc = xhat.data() + static_cast<std::size_t>(c) * N;
        double* oc = out.data() + static_cast<std::size_t>(c) * N;
        for (std::size_t i = 0; i < N; ++i) {
            const double h = (xc[i] - mean) * is;
            hc[i] = h;
            oc[i] = g * h + b;
        }
    }

    st.saved.clear();
    st.saved.push_back(std::move(xhat));
    st.saved.push_back(std::move(inv_std));
    st.mode = mode;
    return out;
}

Tensor BatchNorm2d::backward(const Tensor& gy, const LayerState& st) {
    const Tensor& xhat = st.saved.at(0);
    const Tensor& inv_std = st.saved.at(1);
    require_same_shape(gy, xhat, "batchnorm2d backward");
    const int H = gy.height(), W = gy.width();
    const std::size_t N = static_cast<std::size_t>(H) * W;

    Tensor gx(gy.shape());
    for (int c = 0; c < channels_; ++c) {
        const double* gc = gy.data() + static_cast<std::size_t>(c) * N;
        const double* hc = xhat.data() + static_cast<std::size_t>(c) * N;
        double* xc = gx.data() + static_cast<std::size_t>(c) * N;
        const double g = gamma.value[static_cast<std::size_t>(c)];
        const double is = inv_std[static_cast<std::size_t>(c)];

        double sum_g = 0.0, sum_gh = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            sum_g += gc[i];
            sum_gh += gc[i] * hc[i];
        }
        gamma.grad[static_cast<std::size_t>(c)] += sum_gh;
        beta.grad[static_cast<std::size_t>(c)] += sum_g;

        if (st.mode == Mode::Train) {
            const double mg = sum_g / static_cast<double>(N);
            const double mgh = sum_gh / static_cast<double>(N);
            const double scale = g * is;
            for (std::size_t i = 0; i < N; ++i) {
                xc[i] = scale * (gc[i] - mg - hc[i] * mgh);
            }
        } else {
            const double scale = g * is;
            for (std::size_t i = 0; i < N; ++i) xc[i] = scale * gc[i];
        }
    }
    return gx;
}

Tensor Activation::forward(const Tensor& x, LayerState& st, Mode mode) {
    Tensor out(x.shape());
    const double* xd = x.data();
    double* od = out.data();
    switch (act_) {
        case Act::Relu:
            for (std::size_t i = 0; i < x.size(); ++i) od[i] = xd[i] > 0.0 ? xd[i] : 0.0;
            break;
        case Act::LeakyRelu:
            for (std::size_t i = 0; i < x.size(); ++i)
                od[i] = xd[i] > 0.0 ? xd[i] : slope_ * xd[i];
            break;
        case Act::Sigmoid:
            for (std::size_t i = 0; i < x.size(); ++i) od[i] = 1.0 / (1.0 + std::exp(-xd[i]));
            break;
    }
    st.saved.clear();
    st.saved.push_back(act_ == Act::Sigmoid ? out : x);
    st.mode = mode;
    return out;
}

Tensor Activation::backward(const Tensor& gy, const LayerState& st) {
    const Tensor& saved = st.saved.at(0);
    require_same_shape(gy, saved, "activation backward");
    Tensor gx(gy.shape());
    const double* gd = gy.data();
    const double* sd = saved.data();
    double* xd = gx.data();
    switch (act_) {
        case Act::Relu:
            for (std::size_t i = 0; i < gy.size(); ++i) xd[i] = sd[i] > 0.0 ? gd[i] : 0.0;
            break;
        case Act::LeakyRelu:
            for (std::size_t i = 0; i < gy.size(); ++i)
                xd[i] = sd[i] > 0.0 ? gd[i] : slope_ * gd[i];
            break;
        case Act::Sigmoid:
            for (std::size_t i = 0; i < gy.size(); ++i) xd[i] = gd[i] * sd[i] * (1.0 - sd[i]);
            break;
    }
    return gx;
}

std::string Activation::kind() const {
    switch (act_) {
        case Act::Relu: return "relu";
        case Act::LeakyRelu: return "leaky_relu";
        case Act::Sigmoid: return "sigmoid";
    }
    return "activation";
}

Tensor Sequential::forward(const Tensor& x, Ctx& ctx, Mode mode) {
    ctx.states.assign(layers_.size(), LayerState{});
    Tensor cur = x;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        cur = layers_[i]->forward(cur, ctx.states[i], mode);
    }
    return cur;
}

Tensor Sequential::backward(const Tensor& gy, const Ctx& ctx) {
    if (ctx.states.size() != layers_.size()) {
        throw ShapeError("sequential backward: context does not match forward pass");
    }
    Tensor cur = gy;
    for (std::size_t i = layers_.size(); i-- > 0;) {
        cur = layers_[i]->backward(cur, ctx.states[i]);
    }
    return cur;
}

std::vector<Param*> Sequential::params() {
    std::vector<Param*> out;
    for (auto& l : layers_) {
        for (Param* p : l->params()) out.push_back(p);
    }
    return out;
}

std::unique_ptr<Layer> conv3x3(int in_ch, int out_ch, Rng& rng) {
    return std::make_unique<Conv2d>(in_ch, out_ch, 3, 1, 1, rng);
}
std::unique_ptr<Layer> conv1x1(int in_ch, int out_ch, Rng& rng) {
    return std::make_unique<Conv2d>(in_ch, out_ch, 1, 1, 0, rng);
}
std::unique_ptr<Layer> conv4x4s2(int in_ch, int out_ch, Rng& rng) {
    return std::make_unique<Conv2d>(in_ch, out_ch, 4, 2, 1, rng);
}
std::unique_ptr<Layer> convT4x4s2(int in_ch, int out_ch, Rng& rng) {
    return std::make_unique<ConvTranspose2d>(in_ch, out_ch, 4, 2, 1, rng);
}
std::unique_ptr<Layer> batchnorm(int channels) { return std::make_unique<BatchNorm2d>(channels); }
std::unique_ptr<Layer> relu() { return std::make_unique<Activation>(Act::Relu); }
std::unique_ptr<Layer> leaky_relu(double slope) {
    return std::make_unique<Activation>(Act::LeakyRelu, slope);
}
std::unique_ptr<Layer> sigmoid() { return std::make_unique<Activation>(Act::Sigmoid); }

}  // namespace wavecomm::nn

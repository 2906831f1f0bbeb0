#pragma once

#include <memory>
#include <string>
#include <vector>

#include "wavecomm/rng.hpp"
#include "wavecomm/tensor.hpp"

namespace wavecomm::nn {

enum class Mode { Train, Eval };

// Trainable parameter with accumulated gradient and per-parameter Adam state.
struct Param {
    Tensor value;
    Tensor grad;
    Tensor adam_m;
    Tensor adam_v;
    int adam_t = 0;

    explicit Param(Tensor v)
        : value(std::move(v)),
          grad(value.shape()),
          adam_m(value.shape()),
          adam_v(value.shape()) {}

    void zero_grad() { grad.fill(0.0); }
};

// Per-invocation saved activations. Networks may be run forward several times
// (once per agent) before any backward pass, so nothing backward needs may
// live inside the layer object itself.
struct LayerState {
    std::vector<Tensor> saved;
    Mode mode = Mode::Train;
};

class Layer {
public:
    virtual ~Layer() = default;

    // Returns the output and records whatever backward will need into `st`.
    virtual Tensor forward(const Tensor& x, LayerState& st, Mode mode) = 0;

    // Accumulates parameter gradients and returns the input gradient.
    virtual Tensor backward(const Tensor& gy, const LayerState& st) = 0;

    virtual std::vector<Param*> params() { return {}; }
    virtual std::string kind() const = 0;
};

class Conv2d final : public Layer {
public:
    Conv2d(int in_ch, int out_ch, int kernel, int stride, int pad, Rng& rng);

    Tensor forward(const Tensor& x, LayerState& st, Mode mode) override;
    Tensor backward(const Tensor& gy, const LayerState& st) override;
    std::vector<Param*> params() override { return {&weight, &bias}; }
    std::string kind() const override { return "conv2d"; }

    // Zeroes weight and bias; used where a residual branch must start inert.
    void zero_init();

    int in_channels() const { return in_ch_; }
    int out_channels() const { return out_ch_; }

    Param weight;  // [out, in, k, k]
    Param bias;    // [out]

private:
    int in_ch_, out_ch_, k_, s_, p_;
};

class ConvTranspose2d final : public Layer {
public:
    ConvTranspose2d(int in_ch, int out_ch, int kernel, int stride, int pad, Rng& rng);

    Tensor forward(const Tensor& x, LayerState& st, Mode mode) override;
    Tensor backward(const Tensor& gy, const LayerState& st) override;
    std::vector<Param*> params() override { return {&weight, &bias}; }
    std::string kind() const override { return "conv_transpose2d"; }

    Param weight;  // [in, out, k, k]
    Param bias;    // [out]

private:
    int in_ch_, out_ch_, k_, s_, p_;
};

class BatchNorm2d final : public Layer {
public:
    explicit BatchNorm2d(int channels, double eps = 1e-5, double momentum = 0.1);

    Tensor forward(const Tensor& x, LayerState& st, Mode mode) override;
    Tensor backward(const Tensor& gy, const LayerState& st) override;
    std::vector<Param*> params() override { return {&gamma, &beta}; }
    std::string kind() const override { return "batchnorm2d"; }

    Param gamma;  // [C], init 1
    Param beta;   // [C], init 0
    Tensor running_mean;
    Tensor running_var;

private:
    int channels_;
    double eps_;
    double momentum_;
};

enum class Act { Relu, LeakyRelu, Sigmoid };

class Activation final : public Layer {
public:
    explicit Activation(Act act, double slope = 0.2) : act_(act), slope_(slope) {}

    Tensor forward(const Tensor& x, LayerState& st, Mode mode) override;
    Tensor backward(const Tensor& gy, const LayerState& st) override;
    std::string kind() const override;

private:
    Act act_;
    double slope_;
};

// Ordered layer stack. Forward/backward pairs communicate through an external
// Ctx so one Sequential can serve several in-flight invocations.
class Sequential {
public:
    struct Ctx {
        std::vector<LayerState> states;
    };

    Sequential() = default;
    Sequential(Sequential&&) = default;
    Sequential& operator=(Sequential&&) = default;

    void add(std::unique_ptr<Layer> layer) { layers_.push_back(std::move(layer)); }

    Tensor forward(const Tensor& x, Ctx& ctx, Mode mode);
    Tensor backward(const Tensor& gy, const Ctx& ctx);

    std::vector<Param*> params();
    const std::vector<std::unique_ptr<Layer>>& layers() const { return layers_; }
    std::size_t size() const { return layers_.size(); }
    bool empty() const { return layers_.empty(); }

private:
    std::vector<std::unique_ptr<Layer>> layers_;
};

std::unique_ptr<Layer> conv3x3(int in_ch, int out_ch, Rng& rng);
std::unique_ptr<Layer> conv1x1(int in_ch, int out_ch, Rng& rng);
std::unique_ptr<Layer> conv4x4s2(int in_ch, int out_ch, Rng& rng);
std::unique_ptr<Layer> convT4x4s2(int in_ch, int out_ch, Rng& rng);
std::unique_ptr<Layer> batchnorm(int channels);
std::unique_ptr<Layer> relu();
std::unique_ptr<Layer> leaky_relu(double slope = 0.2);
std::unique_ptr<Layer> sigmoid();

}  // namespace wavecomm::nn

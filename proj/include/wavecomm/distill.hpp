#pragma once

#include "wavecomm/layers.hpp"
#include "wavecomm/losses.hpp"
#include "wavecomm/optimizer.hpp"
#include "wavecomm/wavelet.hpp"

namespace wavecomm {

// Generator: Decoder 2x(conv3x3+BN+ReLU) C->2C->2C, then one
// (convT4x4s2+BN+ReLU) upsample block per DWT level at width 2C, then Output
// 2x(conv3x3+BN+ReLU) 2C->2C->C. Maps C x h x w LL to C x h*2^L x w*2^L.
nn::Sequential build_generator(int channels, int levels, nn::Rng& rng);

// Discriminator: three conv4x4-stride2 blocks (conv + LeakyReLU 0.2 + BN,
// BN omitted on the first), widths C->C->2C->4C, then conv1x1 -> Sigmoid
// producing a 1 x H/8 x W/8 probability map.
nn::Sequential build_discriminator(int channels, nn::Rng& rng);

enum class SenderVariant { Base, AddFuse, ConcatFuse };

const char* sender_variant_name(SenderVariant v);
SenderVariant sender_variant_from_name(const std::string& name);

// Sender-side preparation of the transmit tensor from a subband pyramid.
// Base passes LL through. AddFuse adds a projection of the coarsest-level
// detail bands (zero-initialized final conv, so it starts identical to
// Base). ConcatFuse mixes [LL, proj(details)] back to C channels with a
// conv1x1. Output shape always equals the LL shape.
class SenderNet {
public:
    struct Ctx {
        nn::Sequential::Ctx proj;
        nn::Sequential::Ctx mix;
    };

    struct BandGrads {
        nn::Tensor g_ll;
        nn::Tensor g_lh, g_hl, g_hh;  // coarsest level; zero for Base
    };

    SenderNet(SenderVariant variant, int channels, nn::Rng& rng);

    nn::Tensor prepare(const SubbandPyramid& pyr, Ctx& ctx, nn::Mode mode);
    BandGrads backward(const nn::Tensor& g_out, const SubbandPyramid& pyr, const Ctx& ctx);

    std::vector<nn::Param*> params();
    SenderVariant variant() const { return variant_; }
    nn::Sequential& proj_net() { return proj_; }
    nn::Sequential& mix_net() { return mix_; }

private:
    SenderVariant variant_;
    int channels_;
    nn::Sequential proj_;  // conv1x1(3C->C) + ReLU + conv1x1(C->C)
    nn::Sequential mix_;   // ConcatFuse only: conv1x1(2C->C)
};

struct DistillNets {
    nn::Sequential generator;
    nn::Sequential discriminator;
    int channels = 0;
    int levels = 1;
};

DistillNets build_distill_nets(int channels, int levels, nn::Rng& rng);

struct DistillStepConfig {
    LossWeights weights;
    nn::AdamConfig adam;
    bool percep_per_channel = false;
};

struct DistillReport {
    double l_recon = 0.0;
    double l_ssim = 0.0;
    double l_percep = 0.0;
    double l_g = 0.0;
    double l_d = 0.0;
    double l_recon_total = 0.0;
    double l_adv = 0.0;
};

// One alternating adversarial step: discriminator update (generator output
// detached), then generator update on L_ReconTotal + L_Adv. `adv_real`
// selects the discriminator's real sample; null means the restored target.
// Throws NumericError if any loss goes non-finite.
DistillReport distill_train_step(DistillNets& nets, const nn::Tensor& ll,
                                 const nn::Tensor& target, const DistillStepConfig& cfg,
                                 const nn::Tensor* adv_real = nullptr);

}  // namespace wavecomm

#include "wavecomm/distill.hpp"

#include <cmath>

#include "wavecomm/errors.hpp"

namespace wavecomm {

using nn::Mode;
using nn::Rng;
using nn::Sequential;
using nn::Tensor;

Sequential build_generator(int channels, int levels, Rng& rng) {
    if (channels < 1) throw ConfigError("build_generator: channels must be >= 1");
    if (levels < 1 || levels > 3) throw ConfigError("build_generator: levels must be in {1,2,3}");
    const int w = 2 * channels;
    Sequential net;
    net.add(nn::conv3x3(channels, w, rng));
    net.add(nn::batchnorm(w));
    net.add(nn::relu());
    net.add(nn::conv3x3(w, w, rng));
    net.add(nn::batchnorm(w));
    net.add(nn::relu());
    for (int l = 0; l < levels; ++l) {
        net.add(nn::convT4x4s2(w, w, rng));
        net.add(nn::batchnorm(w));
        net.add(nn::relu());
    }
    net.add(nn::conv3x3(w, w, rng));
    net.add(nn::batchnorm(w));
    net.add(nn::relu());
    net.add(nn::conv3x3(w, channels, rng));
    net.add(nn::batchnorm(channels));
    net.add(nn::relu());
    return net;
}

Sequential build_discriminator(int channels, Rng& rng) {
    if (channels < 1) throw ConfigError("build_discriminator: channels must be >= 1");
    Sequential net;
    net.add(nn::conv4x4s2(channels, channels, rng));
    net.add(nn::leaky_relu());
    net.add(nn::conv4x4s2(channels, 2 * channels, rng));
    net.add(nn::leaky_relu());
    net.add(nn::batchnorm(2 * channels));
    net.add(nn::conv4x4s2(2 * channels, 4 * channels, rng));
    net.add(nn::leaky_relu());
    net.add(nn::batchnorm(4 * channels));
    net.add(nn::conv1x1(4 * channels, 1, rng));
    net.add(nn::sigmoid());
    return net;
}

const char* sender_variant_name(SenderVariant v) {
    switch (v) {
        case SenderVariant::Base: return "base";
        case SenderVariant::AddFuse: return "add_fuse";
        case SenderVariant::ConcatFuse: return "concat_fuse";
    }
    return "base";
}

SenderVariant sender_variant_from_name(const std::string& name) {
    if (name == "base") return SenderVariant::Base;
    if (name == "add_fuse") return SenderVariant::AddFuse;
    if (name == "concat_fuse") return SenderVariant::ConcatFuse;
    throw ConfigError("unknown sender variant: " + name);
}

SenderNet::SenderNet(SenderVariant variant, int channels, Rng& rng)
    : variant_(variant), channels_(channels) {
    if (channels < 1) throw ConfigError("sender: channels must be >= 1");
    if (variant_ == SenderVariant::Base) return;
    proj_.add(nn::conv1x1(3 * channels, channels, rng));
    proj_.add(nn::relu());
    auto last = nn::conv1x1(channels, channels, rng);
    if (variant_ == SenderVariant::AddFuse) {
        static_cast<nn::Conv2d*>(last.get())->zero_init();
    }
    proj_.add(std::move(last));
    if (variant_ == SenderVariant::ConcatFuse) {
        mix_.add(nn::conv1x1(2 * channels, channels, rng));
    }
}

namespace {

const SubbandPyramid::Detail& coarsest_detail(const SubbandPyramid& pyr) {
    if (pyr.details.empty()) {
        throw ConfigError("sender: fuse variant requires detail bands");
    }
    return pyr.details.back();
}

}  // namespace

Tensor SenderNet::prepare(const SubbandPyramid& pyr, Ctx& ctx, Mode mode) {
    if (pyr.ll.channels() != channels_) {
        throw ShapeError("sender: pyramid channels do not match net");
    }
    if (variant_ == SenderVariant::Base) return pyr.ll;

    const auto& det = coarsest_detail(pyr);
    Tensor cat = nn::concat_channels({&det.lh, &det.hl, &det.hh});
    Tensor projected = proj_.forward(cat, ctx.proj, mode);
    if (variant_ == SenderVariant::AddFuse) {
        return pyr.ll + projected;
    }
    Tensor mixed_in = nn::concat_channels({&pyr.ll, &projected});
    return mix_.forward(mixed_in, ctx.mix, mode);
}

SenderNet::BandGrads SenderNet::backward(const Tensor& g_out, const SubbandPyramid& pyr,
                                         const Ctx& ctx) {
    BandGrads g;
    if (variant_ == SenderVariant::Base) {
        g.g_ll = g_out;
        if (!pyr.details.empty()) {
            const auto& det = coarsest_detail(pyr);
            g.g_lh = Tensor(det.lh.shape());
            g.g_hl = Tensor(det.hl.shape());
            g.g_hh = Tensor(det.hh.shape());
        }
        return g;
    }

    Tensor g_proj_out;
    if (variant_ == SenderVariant::AddFuse) {
        g.g_ll = g_out;
        g_proj_out = g_out;
    } else {
        Tensor g_mixed_in = mix_.backward(g_out, ctx.mix);
        g.g_ll = nn::slice_channels(g_mixed_in, 0, channels_);
        g_proj_out = nn::slice_channels(g_mixed_in, channels_, 2 * channels_);
    }
    Tensor g_cat = proj_.backward(g_proj_out, ctx.proj);
    g.g_lh = nn::slice_channels(g_cat, 0, channels_);
    g.g_hl = nn::slice_channels(g_cat, channels_, 2 * channels_);
    g.g_hh = nn::slice_channels(g_cat, 2 * channels_, 3 * channels_);
    return g;
}

std::vector<nn::Param*> SenderNet::params() {
    std::vector<nn::Param*> out = proj_.params();
    for (nn::Param* p : mix_.params()) out.push_back(p);
    return out;
}

DistillNets build_distill_nets(int channels, int levels, Rng& rng) {
    DistillNets nets;
    nets.channels = channels;
    nets.levels = levels;
    nets.generator = build_generator(channels, levels, rng);
    nets.discriminator = build_discriminator(channels, rng);
    return nets;
}

DistillReport distill_train_step(DistillNets& nets, const Tensor& ll, const Tensor& target,
                                 const DistillStepConfig& cfg, const Tensor* adv_real) {
    const Tensor& real = adv_real ? *adv_real : target;

    // Generator forward once; its output serves the D step (detached) and
    // the G step (through the saved context).
    Sequential::Ctx g_ctx;
    Tensor fhat = nets.generator.forward(ll, g_ctx, Mode::Train);
    require_same_shape(fhat, target, "distill_train_step target");

    // Discriminator update.
    Sequential::Ctx d_real_ctx, d_fake_ctx;
    Tensor p_real = nets.discriminator.forward(real, d_real_ctx, Mode::Train);
    Tensor p_fake = nets.discriminator.forward(fhat, d_fake_ctx, Mode::Train);
    AdvLoss d_losses = loss_adv(p_real, p_fake);
    nets.discriminator.backward(d_losses.grad_d_real, d_real_ctx);
    nets.discriminator.backward(d_losses.grad_d_fake, d_fake_ctx);
    auto d_params = nets.discriminator.params();
    nn::adam_step(d_params, cfg.adam);

    // Generator update against the refreshed discriminator.
    LossValue recon = loss_recon(fhat, target);
    LossValue ssim = loss_ssim(fhat, target);
    LossValue percep = loss_percep(fhat, target, cfg.percep_per_channel);

    Sequential::Ctx g_adv_ctx;
    Tensor p_fake2 = nets.discriminator.forward(fhat, g_adv_ctx, Mode::Train);
    AdvLoss g_losses = loss_adv(p_real, p_fake2);

    Tensor g_fhat(fhat.shape());
    const LossWeights& w = cfg.weights;
    for (std::size_t i = 0; i < g_fhat.size(); ++i) {
        g_fhat[i] = w.lambda_recon * (w.alpha * recon.grad_pred[i] + w.beta * ssim.grad_pred[i] +
                                      w.gamma * percep.grad_pred[i]);
    }
    if (w.lambda_adv != 0.0) {
        Tensor g_p = g_losses.grad_g_fake * w.lambda_adv;
        Tensor g_through_d = nets.discriminator.backward(g_p, g_adv_ctx);
        // That pass also scribbled into D's grads; discard them.
        nn::zero_grads(d_params);
        g_fhat += g_through_d;
    }
    nets.generator.backward(g_fhat, g_ctx);
    auto g_params = nets.generator.params();
    nn::adam_step(g_params, cfg.adam);

    DistillReport rep;
    rep.l_recon = recon.value;
    rep.l_ssim = ssim.value;
    rep.l_percep = percep.value;
    rep.l_g = g_losses.l_g;
    rep.l_d = d_losses.l_d;
    MsdTotal tot = msd_total({rep.l_recon, rep.l_ssim, rep.l_percep, rep.l_g, rep.l_d}, w);
    rep.l_recon_total = tot.l_recon_total;
    rep.l_adv = tot.l_adv;
    if (!std::isfinite(rep.l_recon_total) || !std::isfinite(rep.l_adv) ||
        !std::isfinite(rep.l_d)) {
        throw NumericError("distill_train_step: non-finite loss (L_ReconTotal=" +
                           std::to_string(rep.l_recon_total) + ", L_Adv=" +
                           std::to_string(rep.l_adv) + ", L_D=" + std::to_string(rep.l_d) + ")");
    }
    return rep;
}

}  // namespace wavecomm

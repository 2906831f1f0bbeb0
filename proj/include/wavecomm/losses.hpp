#pragma once

#include "wavecomm/tensor.hpp"

namespace wavecomm {

// Scalar loss plus its gradient with respect to the prediction argument.
struct LossValue {
    double value = 0.0;
    nn::Tensor grad_pred;
};

// Mean absolute error.
LossValue loss_recon(const nn::Tensor& pred, const nn::Tensor& target);

// Mean squared difference of L2-normalized tensors. Norms are taken over the
// whole tensor by default; per_channel normalizes each channel separately.
// Zero-norm inputs are rejected.
LossValue loss_percep(const nn::Tensor& pred, const nn::Tensor& target,
                      bool per_channel = false);

// 1 - mean SSIM, per channel, 11x11 Gaussian window sigma 1.5, valid windows
// only. Dynamic range L = max(target) - min(target), floored at 1e-3;
// C1=(0.01L)^2, C2=(0.03L)^2.
LossValue loss_ssim(const nn::Tensor& pred, const nn::Tensor& target);

// Binary cross-entropy GAN losses over discriminator probability maps.
// Probabilities are clamped to [1e-7, 1-1e-7]; clamped cells get zero grad.
struct AdvLoss {
    double l_d = 0.0;
    double l_g = 0.0;
    nn::Tensor grad_d_real;  // dL_D / dP_real
    nn::Tensor grad_d_fake;  // dL_D / dP_fake
    nn::Tensor grad_g_fake;  // dL_G / dP_fake
};
AdvLoss loss_adv(const nn::Tensor& p_real, const nn::Tensor& p_fake);

// Generator side alone: L_G and its gradient, without needing a real map.
LossValue loss_gen(const nn::Tensor& p_fake);

struct LossWeights {
    double lambda_recon = 1.0;
    double lambda_adv = 0.01;
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 0.1;
};

struct MsdTerms {
    double l_recon = 0.0;
    double l_ssim = 0.0;
    double l_percep = 0.0;
    double l_g = 0.0;
    double l_d = 0.0;
};

struct MsdTotal {
    double l_recon_total = 0.0;
    double l_adv = 0.0;
    double l_d = 0.0;
};

// L_ReconTotal = lambda_recon * (alpha*L_Recon + beta*L_SSIM + gamma*L_Percep);
// L_Adv = lambda_adv * L_G; L_D passes through.
MsdTotal msd_total(const MsdTerms& terms, const LossWeights& w);

}  // namespace wavecomm

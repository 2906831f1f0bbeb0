#include "wavecomm/losses.hpp"

#include <array>
#include <cmath>

#include "wavecomm/errors.hpp"

namespace wavecomm {

using nn::Tensor;

LossValue loss_recon(const Tensor& pred, const Tensor& target) {
    require_same_shape(pred, target, "loss_recon");
    LossValue lv;
    lv.grad_pred = Tensor(pred.shape());
    const double n = static_cast<double>(pred.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - target[i];
        acc += std::fabs(d);
        lv.grad_pred[i] = (d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0)) / n;
    }
    lv.value = acc / n;
    return lv;
}

namespace {

// One normalization group: elements [off, off+len). Accumulates loss and the
// gradient w.r.t. pred over that slice.
void percep_group(const Tensor& pred, const Tensor& target, std::size_t off, std::size_t len,
                  double inv_n, LossValue& lv) {
    double np2 = 0.0, nt2 = 0.0;
    for (std::size_t i = off; i < off + len; ++i) {
        np2 += pred[i] * pred[i];
        nt2 += target[i] * target[i];
    }
    const double rp = std::sqrt(np2), rt = std::sqrt(nt2);
    if (rp == 0.0 || rt == 0.0) throw NumericError("loss_percep: zero-norm input");

    // u = pred/rp, v = target/rt, d = u - v; s = u . d.
    double s = 0.0, acc = 0.0;
    for (std::size_t i = off; i < off + len; ++i) {
        const double u = pred[i] / rp;
        const double v = target[i] / rt;
        const double d = u - v;
        acc += d * d;
        s += u * d;
    }
    lv.value += acc * inv_n;
    const double k = 2.0 * inv_n / rp;
    for (std::size_t i = off; i < off + len; ++i) {
        const double u = pred[i] / rp;
        const double v = target[i] / rt;
        lv.grad_pred[i] = k * ((u - v) - u * s);
    }
}

}  // namespace

LossValue loss_percep(const Tensor& pred, const Tensor& target, bool per_channel) {
    require_same_shape(pred, target, "loss_percep");
    LossValue lv;
    lv.grad_pred = Tensor(pred.shape());
    const double inv_n = 1.0 / static_cast<double>(pred.size());
    if (per_channel) {
        if (pred.rank() != 3) throw ShapeError("loss_percep: per-channel needs rank-3");
        const std::size_t plane = static_cast<std::size_t>(pred.height()) * pred.width();
        for (int c = 0; c < pred.channels(); ++c) {
            percep_group(pred, target, static_cast<std::size_t>(c) * plane, plane, inv_n, lv);
        }
    } else {
        percep_group(pred, target, 0, pred.size(), inv_n, lv);
    }
    return lv;
}

namespace {

constexpr int kWin = 11;
constexpr int kHalf = kWin / 2;

const std::array<double, kWin * kWin>& gaussian_window() {
    static const auto w = [] {
        std::array<double, kWin * kWin> a{};
        const double sigma = 1.5;
        double sum = 0.0;
        for (int dy = -kHalf; dy <= kHalf; ++dy) {
            for (int dx = -kHalf; dx <= kHalf; ++dx) {
                const double v = std::exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma));
                a[static_cast<std::size_t>((dy + kHalf) * kWin + dx + kHalf)] = v;
                sum += v;
            }
        }
        for (auto& v : a) v /= sum;
        return a;
    }();
    return w;
}

}  // namespace

LossValue loss_ssim(const Tensor& pred, const Tensor& target) {
    require_same_shape(pred, target, "loss_ssim");
    if (pred.rank() != 3) throw ShapeError("loss_ssim: expected rank-3 tensors");
    const int C = pred.channels(), H = pred.height(), W = pred.width();
    if (H < kWin || W < kWin) {
        throw ConfigError("loss_ssim: spatial dims must be >= " + std::to_string(kWin));
    }

    const double range = std::max(target.max() - target.min(), 1e-3);
    const double c1 = (0.01 * range) * (0.01 * range);
    const double c2 = (0.03 * range) * (0.03 * range);
    const auto& win = gaussian_window();

    LossValue lv;
    lv.grad_pred = Tensor(pred.shape());
    const int Hv = H - kWin + 1, Wv = W - kWin + 1;
    const double inv_m = 1.0 / (static_cast<double>(C) * Hv * Wv);

    double ssim_sum = 0.0;
    for (int c = 0; c < C; ++c) {
        const double* xp = pred.data() + static_cast<std::size_t>(c) * H * W;
        const double* yp = target.data() + static_cast<std::size_t>(c) * H * W;
        double* gp = lv.grad_pred.data() + static_cast<std::size_t>(c) * H * W;
        for (int wy = 0; wy < Hv; ++wy) {
            for (int wx = 0; wx < Wv; ++wx) {
                // Weighted means, then central moments in a second pass.
                double mx = 0.0, my = 0.0;
                for (int dy = 0; dy < kWin; ++dy) {
                    const double* xr = xp + static_cast<std::size_t>(wy + dy) * W + wx;
                    const double* yr = yp + static_cast<std::size_t>(wy + dy) * W + wx;
                    const double* wr = win.data() + static_cast<std::size_t>(dy) * kWin;
                    for (int dx = 0; dx < kWin; ++dx) {
                        mx += wr[dx] * xr[dx];
                        my += wr[dx] * yr[dx];
                    }
                }
                double vx = 0.0, vy = 0.0, cov = 0.0;
                for (int dy = 0; dy < kWin; ++dy) {
                    const double* xr = xp + static_cast<std::size_t>(wy + dy) * W + wx;
                    const double* yr = yp + static_cast<std::size_t>(wy + dy) * W + wx;
                    const double* wr = win.data() + static_cast<std::size_t>(dy) * kWin;
                    for (int dx = 0; dx < kWin; ++dx) {
                        const double ex = xr[dx] - mx;
                        const double ey = yr[dx] - my;
                        vx += wr[dx] * ex * ex;
                        vy += wr[dx] * ey * ey;
                        cov += wr[dx] * ex * ey;
                    }
                }
                const double a2 = 2.0 * mx * my + c1;   // luminance numerator
                const double a1 = 2.0 * cov + c2;       // structure numerator
                const double b1 = mx * mx + my * my + c1;
                const double b2 = vx + vy + c2;
                const double s = (a2 * a1) / (b1 * b2);
                ssim_sum += s;

                // dLoss/dx_i = -(1/M) * dS/dx_i accumulated over windows.
                const double inv_b1b2 = 1.0 / (b1 * b2);
                for (int dy = 0; dy < kWin; ++dy) {
                    const double* xr = xp + static_cast<std::size_t>(wy + dy) * W + wx;
                    const double* yr = yp + static_cast<std::size_t>(wy + dy) * W + wx;
                    double* gr = gp + static_cast<std::size_t>(wy + dy) * W + wx;
                    const double* wr = win.data() + static_cast<std::size_t>(dy) * kWin;
                    for (int dx = 0; dx < kWin; ++dx) {
                        const double wi = wr[dx];
                        const double ex = xr[dx] - mx;
                        const double ey = yr[dx] - my;
                        const double ds = wi * (2.0 * my * a1 + 2.0 * a2 * ey) * inv_b1b2 -
                                          s * wi * (2.0 * mx / b1 + 2.0 * ex / b2);
                        gr[dx] -= inv_m * ds;
                    }
                }
            }
        }
    }
    lv.value = 1.0 - ssim_sum * inv_m;
    return lv;
}

AdvLoss loss_adv(const Tensor& p_real, const Tensor& p_fake) {
    require_same_shape(p_real, p_fake, "loss_adv");
    constexpr double lo = 1e-7, hi = 1.0 - 1e-7;
    AdvLoss al;
    al.grad_d_real = Tensor(p_real.shape());
    al.grad_d_fake = Tensor(p_fake.shape());
    al.grad_g_fake = Tensor(p_fake.shape());
    const double n = static_cast<double>(p_real.size());
    double d_acc = 0.0, g_acc = 0.0;
    for (std::size_t i = 0; i < p_real.size(); ++i) {
        const double prc = std::min(std::max(p_real[i], lo), hi);
        const double pfc = std::min(std::max(p_fake[i], lo), hi);
        d_acc += std::log(prc) + std::log(1.0 - pfc);
        g_acc += std::log(pfc);
        const bool r_clamped = (p_real[i] < lo || p_real[i] > hi);
        const bool f_clamped = (p_fake[i] < lo || p_fake[i] > hi);
        al.grad_d_real[i] = r_clamped ? 0.0 : -1.0 / (n * prc);
        al.grad_d_fake[i] = f_clamped ? 0.0 : 1.0 / (n * (1.0 - pfc));
        al.grad_g_fake[i] = f_clamped ? 0.0 : -1.0 / (n * pfc);
    }
    al.l_d = -d_acc / n;
    al.l_g = -g_acc / n;
    return al;
}

LossValue loss_gen(const Tensor& p_fake) {
    constexpr double lo = 1e-7, hi = 1.0 - 1e-7;
    LossValue lv;
    lv.grad_pred = Tensor(p_fake.shape());
    const double n = static_cast<double>(p_fake.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < p_fake.size(); ++i) {
        const double pfc = std::min(std::max(p_fake[i], lo), hi);
        acc += std::log(pfc);
        const bool clamped = (p_fake[i] < lo || p_fake[i] > hi);
        lv.grad_pred[i] = clamped ? 0.0 : -1.0 / (n * pfc);
    }
    lv.value = -acc / n;
    return lv;
}

MsdTotal msd_total(const MsdTerms& terms, const LossWeights& w) {
    MsdTotal t;
    t.l_recon_total =
        w.lambda_recon * (w.alpha * terms.l_recon + w.beta * terms.l_ssim + w.gamma * terms.l_percep);
    t.l_adv = w.lambda_adv * terms.l_g;
    t.l_d = terms.l_d;
    return t;
}

}  // namespace wavecomm

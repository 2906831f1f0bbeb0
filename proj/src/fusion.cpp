#include "wavecomm/fusion.hpp"

#include <cmath>
#include <limits>

#include "wavecomm/errors.hpp"

namespace wavecomm {

using nn::Mode;
using nn::Tensor;

namespace {

struct InversePose {
    double ia, ib, ic, id, tx, ty;
};

InversePose invert(const AffinePose& pose) {
    const double a = pose.m[0], b = pose.m[1], tx = pose.m[2];
    const double c = pose.m[3], d = pose.m[4], ty = pose.m[5];
    for (double v : pose.m) {
        if (!std::isfinite(v)) throw GeometryError("warp_affine: non-finite pose");
    }
    const double det = a * d - b * c;
    if (std::fabs(det) < 1e-12) throw GeometryError("warp_affine: singular pose");
    return {d / det, -b / det, -c / det, a / det, tx, ty};
}

}  // namespace

WarpResult warp_affine(const Tensor& feat, const AffinePose& pose, int out_h, int out_w) {
    if (feat.rank() != 3) throw ShapeError("warp_affine: expected rank-3 features");
    if (out_h < 1 || out_w < 1) throw ShapeError("warp_affine: degenerate output dims");
    const InversePose ip = invert(pose);
    const int C = feat.channels(), H = feat.height(), W = feat.width();

    WarpResult res{Tensor({C, out_h, out_w}), Tensor({1, out_h, out_w})};
    for (int yo = 0; yo < out_h; ++yo) {
        for (int xo = 0; xo < out_w; ++xo) {
            const double rx = xo - ip.tx, ry = yo - ip.ty;
            const double xs = ip.ia * rx + ip.ib * ry;
            const double ys = ip.ic * rx + ip.id * ry;
            if (xs < 0.0 || xs > W - 1 || ys < 0.0 || ys > H - 1) continue;
            res.mask.at(0, yo, xo) = 1.0;
            const int x0 = static_cast<int>(std::floor(xs));
            const int y0 = static_cast<int>(std::floor(ys));
            const double fx = xs - x0, fy = ys - y0;
            for (int c = 0; c < C; ++c) {
                double v = (1.0 - fy) * (1.0 - fx) * feat.at(c, y0, x0);
                if (x0 + 1 <= W - 1) v += (1.0 - fy) * fx * feat.at(c, y0, x0 + 1);
                if (y0 + 1 <= H - 1) v += fy * (1.0 - fx) * feat.at(c, y0 + 1, x0);
                if (x0 + 1 <= W - 1 && y0 + 1 <= H - 1) v += fy * fx * feat.at(c, y0 + 1, x0 + 1);
                res.warped.at(c, yo, xo) = v;
            }
        }
    }
    return res;
}

Tensor warp_affine_backward(const Tensor& g_out, const AffinePose& pose, int in_h, int in_w) {
    if (g_out.rank() != 3) throw ShapeError("warp_affine_backward: expected rank-3 gradient");
    const InversePose ip = invert(pose);
    const int C = g_out.channels(), out_h = g_out.height(), out_w = g_out.width();
    const int H = in_h, W = in_w;

    Tensor gin({C, H, W});
    for (int yo = 0; yo < out_h; ++yo) {
        for (int xo = 0; xo < out_w; ++xo) {
            const double rx = xo - ip.tx, ry = yo - ip.ty;
            const double xs = ip.ia * rx + ip.ib * ry;
            const double ys = ip.ic * rx + ip.id * ry;
            if (xs < 0.0 || xs > W - 1 || ys < 0.0 || ys > H - 1) continue;
            const int x0 = static_cast<int>(std::floor(xs));
            const int y0 = static_cast<int>(std::floor(ys));
            const double fx = xs - x0, fy = ys - y0;
            for (int c = 0; c < C; ++c) {
                const double g = g_out.at(c, yo, xo);
                gin.at(c, y0, x0) += (1.0 - fy) * (1.0 - fx) * g;
                if (x0 + 1 <= W - 1) gin.at(c, y0, x0 + 1) += (1.0 - fy) * fx * g;
                if (y0 + 1 <= H - 1) gin.at(c, y0 + 1, x0) += fy * (1.0 - fx) * g;
                if (x0 + 1 <= W - 1 && y0 + 1 <= H - 1) gin.at(c, y0 + 1, x0 + 1) += fy * fx * g;
            }
        }
    }
    return gin;
}

SoftmaxFusion::SoftmaxFusion(int channels, nn::Rng& rng)
    : channels_(channels), score_(channels, 1, 1, 1, 0, rng) {}

Tensor SoftmaxFusion::fuse(const std::vector<Tensor>& feats, const std::vector<Tensor>& masks,
                           Ctx& ctx, Mode mode) {
    if (feats.empty()) throw ShapeError("softmax_fuse: need at least one agent");
    if (feats.size() != masks.size()) throw ShapeError("softmax_fuse: feats/masks mismatch");
    const int n = static_cast<int>(feats.size());
    const int C = feats[0].channels(), H = feats[0].height(), W = feats[0].width();
    if (C != channels_) throw ShapeError("softmax_fuse: channel mismatch with score net");
    for (int i = 1; i < n; ++i) require_same_shape(feats[0], feats[static_cast<std::size_t>(i)],
                                                   "softmax_fuse feats");

    ctx.score_states.assign(static_cast<std::size_t>(n), nn::LayerState{});
    ctx.feats = feats;
    ctx.weights.assign(static_cast<std::size_t>(n), Tensor({1, H, W}));

    std::vector<Tensor> scores;
    scores.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        scores.push_back(
            score_.forward(feats[static_cast<std::size_t>(i)],
                           ctx.score_states[static_cast<std::size_t>(i)], mode));
    }

    Tensor fused({C, H, W});
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            double smax = -std::numeric_limits<double>::infinity();
            for (int i = 0; i < n; ++i) {
                if (masks[static_cast<std::size_t>(i)].at(0, y, x) > 0.5) {
                    smax = std::max(smax, scores[static_cast<std::size_t>(i)].at(0, y, x));
                }
            }
            if (!std::isfinite(smax)) continue;  // invalid everywhere: fused stays 0
            double denom = 0.0;
            for (int i = 0; i < n; ++i) {
                if (masks[static_cast<std::size_t>(i)].at(0, y, x) > 0.5) {
                    denom += std::exp(scores[static_cast<std::size_t>(i)].at(0, y, x) - smax);
                }
            }
            for (int i = 0; i < n; ++i) {
                double w = 0.0;
                if (masks[static_cast<std::size_t>(i)].at(0, y, x) > 0.5) {
                    w = std::exp(scores[static_cast<std::size_t>(i)].at(0, y, x) - smax) / denom;
                }
                ctx.weights[static_cast<std::size_t>(i)].at(0, y, x) = w;
                if (w != 0.0) {
                    for (int c = 0; c < C; ++c) {
                        fused.at(c, y, x) += w * feats[static_cast<std::size_t>(i)].at(c, y, x);
                    }
                }
            }
        }
    }
    ctx.fused = fused;
    return fused;
}

std::vector<Tensor> SoftmaxFusion::backward(const Tensor& g_fused, const Ctx& ctx) {
    const int n = static_cast<int>(ctx.feats.size());
    if (n == 0) throw ShapeError("softmax_fuse backward: empty context");
    require_same_shape(g_fused, ctx.fused, "softmax_fuse backward");
    const int C = g_fused.channels(), H = g_fused.height(), W = g_fused.width();

    std::vector<Tensor> g_feats(static_cast<std::size_t>(n), Tensor(g_fused.shape()));
    for (int i = 0; i < n; ++i) {
        const Tensor& wmap = ctx.weights[static_cast<std::size_t>(i)];
        const Tensor& feat = ctx.feats[static_cast<std::size_t>(i)];

        // Direct path: d fused / d feat_i = w_i per cell.
        Tensor& gf = g_feats[static_cast<std::size_t>(i)];
        for (int c = 0; c < C; ++c) {
            for (int y = 0; y < H; ++y) {
                for (int x = 0; x < W; ++x) {
                    gf.at(c, y, x) = wmap.at(0, y, x) * g_fused.at(c, y, x);
                }
            }
        }

        // Score path: ds_i = sum_c g_c * w_i * (feat_ic - fused_c).
        Tensor ds({1, H, W});
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                const double w = wmap.at(0, y, x);
                if (w == 0.0) continue;
                double acc = 0.0;
                for (int c = 0; c < C; ++c) {
                    acc += g_fused.at(c, y, x) * (feat.at(c, y, x) - ctx.fused.at(c, y, x));
                }
                ds.at(0, y, x) = w * acc;
            }
        }
        gf += score_.backward(ds, ctx.score_states[static_cast<std::size_t>(i)]);
    }
    return g_feats;
}

}  // namespace wavecomm

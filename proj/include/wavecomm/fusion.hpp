#pragma once

#include <array>
#include <vector>

#include "wavecomm/layers.hpp"

namespace wavecomm {

// Row-major 2x3 affine [a b tx; c d ty] mapping sender grid coordinates
// (x, y) to ego grid coordinates. The 2x2 part must be invertible.
struct AffinePose {
    std::array<double, 6> m{1, 0, 0, 0, 1, 0};

    static AffinePose identity() { return {}; }
    static AffinePose translation(double tx, double ty) {
        AffinePose p;
        p.m = {1, 0, tx, 0, 1, ty};
        return p;
    }
};

struct WarpResult {
    nn::Tensor warped;  // C x out_h x out_w
    nn::Tensor mask;    // 1 x out_h x out_w, 1 where the sample was in bounds
};

// Inverse-map bilinear warp into a target grid. Ego cells whose source point
// falls outside [0, W-1] x [0, H-1] are zero-filled and marked invalid.
WarpResult warp_affine(const nn::Tensor& feat, const AffinePose& pose, int out_h, int out_w);

// Scatters the output gradient back through the bilinear weights.
nn::Tensor warp_affine_backward(const nn::Tensor& g_out, const AffinePose& pose, int in_h,
                                int in_w);

// Per-cell softmax-weighted fusion across agents. A shared conv1x1 (C -> 1)
// scores each agent's features; invalid cells are excluded from the softmax;
// cells invalid for every agent fuse to zero.
class SoftmaxFusion {
public:
    SoftmaxFusion(int channels, nn::Rng& rng);

    struct Ctx {
        std::vector<nn::LayerState> score_states;
        std::vector<nn::Tensor> feats;
        std::vector<nn::Tensor> weights;  // per agent, 1 x H x W
        nn::Tensor fused;
    };

    nn::Tensor fuse(const std::vector<nn::Tensor>& feats, const std::vector<nn::Tensor>& masks,
                    Ctx& ctx, nn::Mode mode);

    // Returns per-agent feature gradients; accumulates score-net grads.
    std::vector<nn::Tensor> backward(const nn::Tensor& g_fused, const Ctx& ctx);

    std::vector<nn::Param*> params() { return score_.params(); }
    nn::Conv2d& score_net() { return score_; }

private:
    int channels_;
    nn::Conv2d score_;
};

}  // namespace wavecomm

#pragma once

#include <vector>

#include "wavecomm/layers.hpp"
#include "wavecomm/losses.hpp"

namespace wavecomm {

// Toy BEV encoder: conv4x4s2(1->C) + BN + ReLU + conv3x3(C->C) + ReLU.
// Halves the grid and lifts it to C channels; its output is both the fusion
// feature and the transmit target.
nn::Sequential build_encoder(int channels, nn::Rng& rng);

// Detection head: conv3x3(C->C) + ReLU + conv1x1(C->1) objectness logits.
nn::Sequential build_head(int channels, nn::Rng& rng);

// Axis-aligned box in integer cells, inclusive origin, positive extent.
struct Box {
    int x0 = 0, y0 = 0, w = 0, h = 0;
};

double box_iou(const Box& a, const Box& b);

struct DetectionTruth {
    std::vector<Box> boxes;  // evaluation-frame cells (full resolution)
    nn::Tensor mask;         // rasterized target at feature resolution, 1 x H/2 x W/2
};

// Mean binary cross-entropy with logits; positives weighted by pos_weight.
LossValue detection_loss(const nn::Tensor& logits, const nn::Tensor& truth_mask,
                         double pos_weight = 1.0);

// 2x max-pool of a 1 x H x W mask, the feature-resolution raster of a
// full-resolution occupancy mask.
nn::Tensor downsample_mask2(const nn::Tensor& mask);

struct ApResult {
    double ap = 0.0;
    bool skipped = false;  // empty ground truth: metric undefined
};

// Sweeps 50 score thresholds over sigmoid(logits), decodes 4-connected
// components into boxes (scaled x2 back to truth resolution), greedy-matches
// by descending IoU, and integrates the precision-recall points with
// all-point interpolation. One ApResult per IoU threshold.
std::vector<ApResult> detection_metric(const nn::Tensor& logits, const DetectionTruth& truth,
                                       const std::vector<double>& iou_thresholds);

}  // namespace wavecomm

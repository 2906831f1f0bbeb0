#include "wavecomm/perception.hpp"

#include <algorithm>
#include <cmath>

#include "wavecomm/errors.hpp"

namespace wavecomm {

using nn::Tensor;

nn::Sequential build_encoder(int channels, nn::Rng& rng) {
    if (channels < 1) throw ConfigError("build_encoder: channels must be >= 1");
    nn::Sequential net;
    net.add(nn::conv4x4s2(1, channels, rng));
    net.add(nn::batchnorm(channels));
    net.add(nn::relu());
    net.add(nn::conv3x3(channels, channels, rng));
    net.add(nn::relu());
    return net;
}

nn::Sequential build_head(int channels, nn::Rng& rng) {
    if (channels < 1) throw ConfigError("build_head: channels must be >= 1");
    nn::Sequential net;
    net.add(nn::conv3x3(channels, channels, rng));
    net.add(nn::relu());
    net.add(nn::conv1x1(channels, 1, rng));
    return net;
}

double box_iou(const Box& a, const Box& b) {
    if (a.w <= 0 || a.h <= 0 || b.w <= 0 || b.h <= 0) return 0.0;
    const int ix0 = std::max(a.x0, b.x0);
    const int iy0 = std::max(a.y0, b.y0);
    const int ix1 = std::min(a.x0 + a.w, b.x0 + b.w);
    const int iy1 = std::min(a.y0 + a.h, b.y0 + b.h);
    const long long iw = std::max(0, ix1 - ix0);
    const long long ih = std::max(0, iy1 - iy0);
    const long long inter = iw * ih;
    const long long uni =
        static_cast<long long>(a.w) * a.h + static_cast<long long>(b.w) * b.h - inter;
    return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

namespace {

double softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

}  // namespace

LossValue detection_loss(const Tensor& logits, const Tensor& truth_mask, double pos_weight) {
    require_same_shape(logits, truth_mask, "detection_loss");
    if (pos_weight <= 0.0) throw ConfigError("detection_loss: pos_weight must be > 0");
    LossValue lv;
    lv.grad_pred = Tensor(logits.shape());
    const double n = static_cast<double>(logits.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        const double z = logits[i];
        const double t = truth_mask[i];
        acc += pos_weight * t * softplus(-z) + (1.0 - t) * softplus(z);
        const double sig = 1.0 / (1.0 + std::exp(-z));
        lv.grad_pred[i] = (sig * (pos_weight * t + 1.0 - t) - pos_weight * t) / n;
    }
    lv.value = acc / n;
    return lv;
}

Tensor downsample_mask2(const Tensor& mask) {
    if (mask.rank() != 3 || mask.channels() != 1) {
        throw ShapeError("downsample_mask2: expected 1 x H x W mask");
    }
    const int H = mask.height(), W = mask.width();
    if (H % 2 != 0 || W % 2 != 0) throw ShapeError("downsample_mask2: odd dims");
    Tensor out({1, H / 2, W / 2});
    for (int y = 0; y < H / 2; ++y) {
        for (int x = 0; x < W / 2; ++x) {
            out.at(0, y, x) = std::max(std::max(mask.at(0, 2 * y, 2 * x),
                                                mask.at(0, 2 * y, 2 * x + 1)),
                                       std::max(mask.at(0, 2 * y + 1, 2 * x),
                                                mask.at(0, 2 * y + 1, 2 * x + 1)));
        }
    }
    return out;
}

namespace {

// 4-connected components of cells where prob > threshold, as feature-grid
// bounding boxes scaled x2 back to the truth frame.
std::vector<Box> decode_boxes(const Tensor& probs, double threshold) {
    const int H = probs.height(), W = probs.width();
    std::vector<char> visited(static_cast<std::size_t>(H) * W, 0);
    std::vector<Box> boxes;
    std::vector<int> stack;
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            const std::size_t idx = static_cast<std::size_t>(y) * W + x;
            if (visited[idx] || probs.at(0, y, x) <= threshold) continue;
            int minx = x, maxx = x, miny = y, maxy = y;
            stack.push_back(static_cast<int>(idx));
            visited[idx] = 1;
            while (!stack.empty()) {
                const int cur = stack.back();
                stack.pop_back();
                const int cy = cur / W, cx = cur % W;
                minx = std::min(minx, cx);
                maxx = std::max(maxx, cx);
                miny = std::min(miny, cy);
                maxy = std::max(maxy, cy);
                const int ny[4] = {cy - 1, cy + 1, cy, cy};
                const int nx[4] = {cx, cx, cx - 1, cx + 1};
                for (int k = 0; k < 4; ++k) {
                    if (ny[k] < 0 || ny[k] >= H || nx[k] < 0 || nx[k] >= W) continue;
                    const std::size_t nidx = static_cast<std::size_t>(ny[k]) * W + nx[k];
                    if (!visited[nidx] && probs.at(0, ny[k], nx[k]) > threshold) {
                        visited[nidx] = 1;
                        stack.push_back(static_cast<int>(nidx));
                    }
                }
            }
            boxes.push_back({2 * minx, 2 * miny, 2 * (maxx - minx + 1), 2 * (maxy - miny + 1)});
        }
    }
    return boxes;
}

struct PrPoint {
    double recall = 0.0;
    double precision = 0.0;
};

// Greedy matching by descending IoU (ties: lower pred index, then lower
// truth index), one match per box on each side.
PrPoint match_boxes(const std::vector<Box>& preds, const std::vector<Box>& truths,
                    double iou_thr) {
    struct Cand {
        double iou;
        int p, t;
    };
    std::vector<Cand> cands;
    for (int p = 0; p < static_cast<int>(preds.size()); ++p) {
        for (int t = 0; t < static_cast<int>(truths.size()); ++t) {
            const double iou = box_iou(preds[static_cast<std::size_t>(p)],
                                       truths[static_cast<std::size_t>(t)]);
            if (iou >= iou_thr) cands.push_back({iou, p, t});
        }
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.iou != b.iou) return a.iou > b.iou;
        if (a.p != b.p) return a.p < b.p;
        return a.t < b.t;
    });
    std::vector<char> p_used(preds.size(), 0), t_used(truths.size(), 0);
    int tp = 0;
    for (const Cand& c : cands) {
        if (p_used[static_cast<std::size_t>(c.p)] || t_used[static_cast<std::size_t>(c.t)]) {
            continue;
        }
        p_used[static_cast<std::size_t>(c.p)] = 1;
        t_used[static_cast<std::size_t>(c.t)] = 1;
        ++tp;
    }
    PrPoint pt;
    pt.recall = truths.empty() ? 0.0 : static_cast<double>(tp) / static_cast<double>(truths.size());
    pt.precision =
        preds.empty() ? 1.0 : static_cast<double>(tp) / static_cast<double>(preds.size());
    return pt;
}

// Area under the precision-recall points with all-point interpolation:
// p_env(r) = max precision among points with recall >= r.
double average_precision(std::vector<PrPoint> pts) {
    std::sort(pts.begin(), pts.end(),
              [](const PrPoint& a, const PrPoint& b) { return a.recall < b.recall; });
    double ap = 0.0;
    double prev_r = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double r = pts[i].recall;
        if (r <= prev_r) continue;
        double pmax = 0.0;
        for (std::size_t j = i; j < pts.size(); ++j) pmax = std::max(pmax, pts[j].precision);
        ap += (r - prev_r) * pmax;
        prev_r = r;
    }
    return ap;
}

}  // namespace

std::vector<ApResult> detection_metric(const Tensor& logits, const DetectionTruth& truth,
                                       const std::vector<double>& iou_thresholds) {
    if (logits.rank() != 3 || logits.channels() != 1) {
        throw ShapeError("detection_metric: expected 1 x H x W logits");
    }
    std::vector<ApResult> out(iou_thresholds.size());
    if (truth.boxes.empty()) {
        for (auto& r : out) r.skipped = true;
        return out;
    }

    Tensor probs(logits.shape());
    for (std::size_t i = 0; i < logits.size(); ++i) {
        probs[i] = 1.0 / (1.0 + std::exp(-logits[i]));
    }

    constexpr int kSteps = 50;
    std::vector<std::vector<Box>> pred_sets;
    pred_sets.reserve(kSteps);
    for (int k = 0; k < kSteps; ++k) {
        pred_sets.push_back(decode_boxes(probs, static_cast<double>(k + 1) / (kSteps + 1)));
    }

    for (std::size_t ti = 0; ti < iou_thresholds.size(); ++ti) {
        std::vector<PrPoint> pts;
        pts.reserve(kSteps);
        for (const auto& preds : pred_sets) {
            pts.push_back(match_boxes(preds, truth.boxes, iou_thresholds[ti]));
        }
        out[ti].ap = average_precision(std::move(pts));
    }
    return out;
}

}  // namespace wavecomm

#pragma once

#include <vector>

#include "wavecomm/layers.hpp"

namespace wavecomm::nn {

struct AdamConfig {
    double lr = 0.002;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Standard Adam with bias correction. Gradients are consumed: they are zeroed
// after the update so accumulation always starts fresh.
void adam_step(const std::vector<Param*>& params, const AdamConfig& cfg);

void zero_grads(const std::vector<Param*>& params);

}  // namespace wavecomm::nn

#pragma once

#include <functional>

#include "wavecomm/layers.hpp"
#include "wavecomm/rng.hpp"

namespace wavecomm::nn {

// Scalar loss over a network output, with its gradient w.r.t. that output.
struct LossProbe {
    double value = 0.0;
    Tensor grad;
};

using LossFn = std::function<LossProbe(const Tensor&)>;

struct GradCheckResult {
    double max_rel_err = 0.0;
    int probes = 0;
};

// Compares analytic gradients (input and parameters) against central finite
// differences at randomly sampled coordinates. Relative error per coordinate:
// |analytic - cd| / max(|analytic|, |cd|, 1e-8).
GradCheckResult grad_check(Sequential& net, const Tensor& input, const LossFn& loss, Rng& rng,
                           int n_probes = 24, double h = 1e-6);

// Mean squared error against a fixed target, usable as a generic probe loss.
LossFn mse_probe(const Tensor& target);

}  // namespace wavecomm::nn

#include "wavecomm/gradcheck.hpp"

#include <cmath>

#include "wavecomm/errors.hpp"
#include "wavecomm/optimizer.hpp"

namespace wavecomm::nn {

GradCheckResult grad_check(Sequential& net, const Tensor& input, const LossFn& loss, Rng& rng,
                           int n_probes, double h) {
    auto params = net.params();
    zero_grads(params);

    Tensor in_copy = input;
    Sequential::Ctx ctx;
    Tensor out = net.forward(in_copy, ctx, Mode::Train);
    LossProbe lp = loss(out);
    require_same_shape(lp.grad, out, "grad_check loss gradient");
    Tensor gin = net.backward(lp.grad, ctx);

    auto eval = [&]() {
        Sequential::Ctx c;
        Tensor o = net.forward(in_copy, c, Mode::Train);
        return loss(o).value;
    };

    // Coordinate universe: every input element plus every parameter element.
    std::size_t total = in_copy.size();
    for (Param* p : params) total += p->value.size();
    if (total == 0) throw ConfigError("grad_check: nothing to probe");

    GradCheckResult res;
    for (int probe = 0; probe < n_probes; ++probe) {
        std::size_t idx = static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<long long>(total) - 1));
        double* slot = nullptr;
        double analytic = 0.0;
        if (idx < in_copy.size()) {
            slot = in_copy.data() + idx;
            analytic = gin[idx];
        } else {
            idx -= in_copy.size();
            for (Param* p : params) {
                if (idx < p->value.size()) {
                    slot = p->value.data() + idx;
                    analytic = p->grad[idx];
                    break;
                }
                idx -= p->value.size();
            }
        }

        const double orig = *slot;
        *slot = orig + h;
        const double lplus = eval();
        *slot = orig - h;
        const double lminus = eval();
        *slot = orig;

        const double cd = (lplus - lminus) / (2.0 * h);
        const double denom = std::max({std::fabs(analytic), std::fabs(cd), 1e-8});
        const double rel = std::fabs(analytic - cd) / denom;
        res.max_rel_err = std::max(res.max_rel_err, rel);
        res.probes += 1;
    }
    zero_grads(params);
    return res;
}

LossFn mse_probe(const Tensor& target) {
    return [target](const Tensor& x) {
        require_same_shape(x, target, "mse_probe");
        LossProbe lp;
        lp.grad = Tensor(x.shape());
        const double n = static_cast<double>(x.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = x[i] - target[i];
            acc += d * d;
            lp.grad[i] = 2.0 * d / n;
        }
        lp.value = acc / n;
        return lp;
    };
}

}  // namespace wavecomm::nn

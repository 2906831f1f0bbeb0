#include "wavecomm/optimizer.hpp"

#include <cmath>

namespace wavecomm::nn {

void adam_step(const std::vector<Param*>& params, const AdamConfig& cfg) {
    for (Param* p : params) {
        p->adam_t += 1;
        const double bc1 = 1.0 - std::pow(cfg.beta1, p->adam_t);
        const double bc2 = 1.0 - std::pow(cfg.beta2, p->adam_t);
        double* v = p->value.data();
        double* g = p->grad.data();
        double* m = p->adam_m.data();
        double* s = p->adam_v.data();
        for (std::size_t i = 0; i < p->value.size(); ++i) {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
            s[i] = cfg.beta2 * s[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double shat = s[i] / bc2;
            v[i] -= cfg.lr * mhat / (std::sqrt(shat) + cfg.eps);
            g[i] = 0.0;
        }
    }
}

void zero_grads(const std::vector<Param*>& params) {
    for (Param* p : params) p->zero_grad();
}

}  // namespace wavecomm::nn

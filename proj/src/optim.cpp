#include "cnnrules/optim.hpp"

#include <cmath>
#include <string>

#include "cnnrules/errors.hpp"

namespace cnnrules {

void adam_step(std::span<float> params, std::span<const float> grads, AdamState& state, float lr) {
    if (params.size() != grads.size() || params.size() != state.m.size()) {
        throw ContractViolation("adam_step: shape mismatch, params=" + std::to_string(params.size()) +
                                " grads=" + std::to_string(grads.size()) +
                                " state=" + std::to_string(state.m.size()));
    }
    state.t += 1;
    const double b1 = state.beta1;
    const double b2 = state.beta2;
    const double bias1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
    const double bias2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        const double m = b1 * state.m[i] + (1.0 - b1) * g;
        const double v = b2 * state.v2[i] + (1.0 - b2) * g * g;
        state.m[i] = static_cast<float>(m);
        state.v2[i] = static_cast<float>(v);
        const double mhat = m / bias1;
        const double vhat = v / bias2;
        params[i] = static_cast<float>(params[i] - lr * mhat / (std::sqrt(vhat) + state.eps));
    }
}

}  // namespace cnnrules

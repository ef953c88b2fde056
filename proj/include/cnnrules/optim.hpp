#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace cnnrules {

// Adam moments for one parameter tensor. t counts completed steps.
struct AdamState {
    std::vector<float> m;
    std::vector<float> v2;
    std::int64_t t = 0;
    float beta1 = 0.9f;
    float beta2 = 0.999f;
    float eps = 1e-8f;

    explicit AdamState(std::size_t size) : m(size, 0.0f), v2(size, 0.0f) {}
};

// One bias-corrected Adam update. params/grads/state must share a size.
void adam_step(std::span<float> params, std::span<const float> grads, AdamState& state, float lr);

}  // namespace cnnrules

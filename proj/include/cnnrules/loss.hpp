#pragma once

#include <cmath>

namespace cnnrules {

inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

struct BceResult {
    double loss;
    double dloss_dz;
};

// Binary cross-entropy on a raw logit, stable for |z| up to ~1e4:
//   loss = max(z, 0) - z*y + ln(1 + exp(-|z|))
//   dloss/dz = sigmoid(z) - y
inline BceResult stable_bce_from_logit(double z, int y) {
    const double loss = (z > 0.0 ? z : 0.0) - z * static_cast<double>(y) + std::log1p(std::exp(-std::fabs(z)));
    return {loss, sigmoid(z) - static_cast<double>(y)};
}

}  // namespace cnnrules

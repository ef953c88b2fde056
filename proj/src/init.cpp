#include "cnnrules/init.hpp"

#include <cmath>

#include "cnnrules/errors.hpp"

namespace cnnrules {

Matrix uniform_init(Pcg32& rng, std::size_t rows, std::size_t cols, float a) {
    if (rows == 0 || cols == 0) throw ContractViolation("uniform_init: dimensions must be positive");
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) {
        // Midpoint of the 24-bit bucket keeps every draw strictly inside (-a, a).
        const auto u = static_cast<float>(rng.next_u32() >> 8);
        m.data[i] = a * ((2.0f * u + 1.0f) * (1.0f / 16777216.0f) - 1.0f);
    }
    return m;
}

Matrix glorot_uniform(Pcg32& rng, std::size_t fan_in, std::size_t fan_out) {
    if (fan_in == 0 || fan_out == 0) throw ContractViolation("glorot_uniform: dimensions must be positive");
    const float a = std::sqrt(6.0f / static_cast<float>(fan_in + fan_out));
    return uniform_init(rng, fan_out, fan_in, a);
}

}  // namespace cnnrules

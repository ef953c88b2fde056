#pragma once

#include "cnnrules/matrix.hpp"
#include "cnnrules/rng.hpp"

namespace cnnrules {

// rows x cols matrix with entries uniform in the open interval (-a, a).
// Consumes one RNG draw per entry in row-major order.
Matrix uniform_init(Pcg32& rng, std::size_t rows, std::size_t cols, float a);

// fan_out x fan_in matrix with the Glorot bound a = sqrt(6 / (fan_in + fan_out)).
Matrix glorot_uniform(Pcg32& rng, std::size_t fan_in, std::size_t fan_out);

}  // namespace cnnrules

#include "cnnrules/matrix.hpp"

#include <cmath>
#include <string>

#include "cnnrules/errors.hpp"

namespace cnnrules {

bool Matrix::all_finite() const {
    for (float v : data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) {
        throw ContractViolation("matmul: dimension mismatch " + std::to_string(a.rows) + "x" +
                                std::to_string(a.cols) + " * " + std::to_string(b.rows) + "x" +
                                std::to_string(b.cols));
    }
    Matrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const float* arow = a.row(i);
        float* crow = c.row(i);
        for (std::size_t j = 0; j < a.cols; ++j) {
            const float aij = arow[j];
            const float* brow = b.row(j);
            for (std::size_t k = 0; k < b.cols; ++k) crow[k] += aij * brow[k];
        }
    }
    return c;
}

float dot(const float* a, const float* b, std::size_t n) {
    float acc = 0.0f;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

Matrix relu(const Matrix& x) {
    Matrix y(x.rows, x.cols);
    for (std::size_t i = 0; i < x.size(); ++i) y.data[i] = x.data[i] > 0.0f ? x.data[i] : 0.0f;
    return y;
}

Matrix relu_mask(const Matrix& x) {
    Matrix y(x.rows, x.cols);
    for (std::size_t i = 0; i < x.size(); ++i) y.data[i] = x.data[i] > 0.0f ? 1.0f : 0.0f;
    return y;
}

}  // namespace cnnrules

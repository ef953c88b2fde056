#pragma once

#include <cstddef>
#include <vector>

namespace cnnrules {

// Dense row-major float32 matrix. All reductions over it run in ascending
// index order; that ordering is part of the determinism contract.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<float> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, float fill = 0.0f) : rows(r), cols(c), data(r * c, fill) {}

    float* row(std::size_t i) { return data.data() + i * cols; }
    const float* row(std::size_t i) const { return data.data() + i * cols; }

    float& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    float at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::size_t size() const { return data.size(); }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0f;
        return m;
    }

    bool all_finite() const;
};

// c[i][k] = sum_j a[i][j] * b[j][k], float accumulation ascending j.
Matrix matmul(const Matrix& a, const Matrix& b);

// Dot product of two length-n float spans, ascending index.
float dot(const float* a, const float* b, std::size_t n);

Matrix relu(const Matrix& x);

// 1 where x > 0, else 0. The subgradient at exactly 0 is 0.
Matrix relu_mask(const Matrix& x);

}  // namespace cnnrules

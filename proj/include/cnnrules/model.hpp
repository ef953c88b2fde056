#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cnnrules/matrix.hpp"
#include "cnnrules/rng.hpp"

namespace cnnrules {

struct ModelConfig {
    std::int32_t vocab_size = 0;
    std::size_t d = 0;          // embedding dimension
    std::size_t n = 0;          // filters per width
    std::size_t max_width = 1;  // widths are 1..max_width, contiguous
    bool has_output_bias = false;

    void validate() const;
};

// Trainable tensors. W[j-1] stores one filter per row: the row is the
// concatenation of j per-position weight vectors of length d. v is ordered
// (width asc, filter asc). E row 0 (PAD) stays all-zero through training.
struct Parameters {
    ModelConfig config;
    Matrix E;               // vocab_size x d
    std::vector<Matrix> W;  // per width j: n x (j*d)
    std::vector<float> v;   // max_width * n
    float b = 0.0f;

    std::size_t v_index(std::size_t width, std::size_t filter) const {
        return (width - 1) * config.n + filter;
    }
};

// Fresh parameters: E ~ U(-0.1, 0.1) on the embeddings stream (PAD row
// zeroed), W Glorot on the filters stream, v Glorot on the output stream.
Parameters init_parameters(const ModelConfig& config, std::uint64_t seed);

struct ForwardCache {
    std::vector<std::int32_t> token_ids;
    std::vector<Matrix> preacts;                  // per width: n x len, pre-ReLU
    std::vector<std::vector<std::size_t>> argmax; // per width: n first-max positions
    std::vector<float> pooled;                    // max_width * n, post-ReLU maxima
    float logit = 0.0f;
};

// Max-over-time CNN forward pass with "same" alignment: the window for
// width j at position i covers i-floor((j-1)/2) .. i+ceil((j-1)/2), with
// zero vectors outside the document.
float forward(const Parameters& params, std::span<const std::int32_t> token_ids, ForwardCache* cache);

inline float forward(const Parameters& params, std::span<const std::int32_t> token_ids) {
    return forward(params, token_ids, nullptr);
}

// Per-document gradients. E gradients are kept sparse (touched rows only, in
// first-touch order); the PAD row is never touched.
struct DocGradients {
    std::vector<Matrix> W;
    std::vector<float> v;
    float b = 0.0f;
    std::vector<std::int32_t> e_rows;
    std::vector<float> e_data;  // e_rows.size() x d, row-major
    std::unordered_map<std::int32_t, std::size_t> e_slot;

    float* e_row(std::int32_t token, std::size_t d);
    Matrix dense_E(std::int32_t vocab_size, std::size_t d) const;
};

// Gradient of the stable BCE loss at label y, routed through the first
// argmax of each pooled filter; ReLU subgradient at 0 is 0.
DocGradients backward(const Parameters& params, const ForwardCache& cache, int y);

// 1 iff logit > 0; an exact 0 logit resolves to 1.
int predict_from_logit(float logit);
int predict(const Parameters& params, std::span<const std::int32_t> token_ids);

// Checkpoint: magic "CNRL", version 0x01, u32 LE header length, JSON header
// {vocab_size,d,widths,n,has_output_bias,seed,vocab}, then raw little-endian
// f32 tensors E, W[1..k], v, optional b.
void save_checkpoint(const Parameters& params, std::uint64_t seed, const std::string& vocab_path,
                     const std::string& out_path);

struct Checkpoint {
    Parameters params;
    std::uint64_t seed = 0;
    std::string vocab_path;
};

Checkpoint load_checkpoint(const std::string& path);

}  // namespace cnnrules

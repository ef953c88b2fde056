// Test-only reference implementations, independent of the library code paths
// they check.
#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "cnnrules/corpus.hpp"
#include "cnnrules/matrix.hpp"
#include "cnnrules/model.hpp"
#include "cnnrules/rules.hpp"

namespace oracles {

// Straight restatement of the PCG32 XSH-RR step, kept separate from
// cnnrules::Pcg32 on purpose.
struct RefPcg32 {
    std::uint64_t state;
    std::uint64_t inc;

    RefPcg32(std::uint64_t initstate, std::uint64_t initseq) {
        state = 0u;
        inc = (initseq << 1u) | 1u;
        next();
        state += initstate;
        next();
    }

    std::uint32_t next() {
        std::uint64_t oldstate = state;
        state = oldstate * 6364136223846793005ULL + inc;
        std::uint32_t xorshifted = static_cast<std::uint32_t>(((oldstate >> 18u) ^ oldstate) >> 27u);
        std::uint32_t rot = static_cast<std::uint32_t>(oldstate >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
    }
};

// Triple-loop matrix product with double accumulation.
inline cnnrules::Matrix naive_matmul(const cnnrules::Matrix& a, const cnnrules::Matrix& b) {
    cnnrules::Matrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t k = 0; k < b.cols; ++k) {
            double acc = 0.0;
            for (std::size_t j = 0; j < a.cols; ++j) {
                acc += static_cast<double>(a.at(i, j)) * static_cast<double>(b.at(j, k));
            }
            c.at(i, k) = static_cast<float>(acc);
        }
    }
    return c;
}

// Literal reading of the network: embed, convolve with "same" alignment and
// zero vectors at the edges, ReLU, max over positions, dot with v.
inline double naive_forward(const cnnrules::Parameters& params, std::span<const std::int32_t> ids) {
    const auto& cfg = params.config;
    const auto len = static_cast<std::ptrdiff_t>(ids.size());
    double logit = 0.0;
    for (std::size_t width = 1; width <= cfg.max_width; ++width) {
        const auto back = static_cast<std::ptrdiff_t>((width - 1) / 2);
        for (std::size_t f = 0; f < cfg.n; ++f) {
            double best = 0.0;
            bool first = true;
            for (std::ptrdiff_t pos = 0; pos < len; ++pos) {
                double pre = 0.0;
                for (std::size_t s = 0; s < width; ++s) {
                    const std::ptrdiff_t t = pos - back + static_cast<std::ptrdiff_t>(s);
                    if (t < 0 || t >= len) continue;
                    const float* emb = params.E.row(static_cast<std::size_t>(ids[t]));
                    const float* w = params.W[width - 1].row(f) + s * cfg.d;
                    for (std::size_t j = 0; j < cfg.d; ++j) {
                        pre += static_cast<double>(w[j]) * static_cast<double>(emb[j]);
                    }
                }
                const double act = pre > 0.0 ? pre : 0.0;
                if (first || act > best) {
                    best = act;
                    first = false;
                }
            }
            logit += static_cast<double>(params.v[(width - 1) * cfg.n + f]) * best;
        }
    }
    if (cfg.has_output_bias) logit += static_cast<double>(params.b);
    return logit;
}

// Checks every pattern of every feature against every document position.
inline cnnrules::FeatureVector naive_fire(std::span<const std::int32_t> ids,
                                          const cnnrules::RuleSet& rules) {
    cnnrules::FeatureVector fired;
    fired.resize(rules.features.size());
    for (const auto& feature : rules.features) {
        for (const auto& pattern : feature.patterns) {
            if (pattern.size() > ids.size()) continue;
            for (std::size_t start = 0; start + pattern.size() <= ids.size(); ++start) {
                bool match = true;
                for (std::size_t s = 0; s < pattern.size(); ++s) {
                    if (ids[start + s] != pattern[s] || ids[start + s] == cnnrules::kPadId) {
                        match = false;
                        break;
                    }
                }
                if (match) {
                    fired.set(feature.id);
                    break;
                }
            }
        }
    }
    return fired;
}

// Small random model for oracle comparisons; parameters are O(1) so the
// gradients stay well away from the float noise floor.
inline cnnrules::Parameters random_model(cnnrules::Pcg32& rng, std::int32_t vocab_size, std::size_t d,
                                         std::size_t n, std::size_t max_width, bool bias = false) {
    cnnrules::Parameters params;
    params.config = {vocab_size, d, n, max_width, bias};
    auto fill = [&rng](cnnrules::Matrix& m) {
        for (float& x : m.data) x = 2.0f * rng.next_float() - 1.0f;
    };
    params.E = cnnrules::Matrix(static_cast<std::size_t>(vocab_size), d);
    fill(params.E);
    for (std::size_t j = 0; j < d; ++j) params.E.at(0, j) = 0.0f;
    for (std::size_t width = 1; width <= max_width; ++width) {
        params.W.emplace_back(n, width * d);
        fill(params.W.back());
    }
    params.v.resize(max_width * n);
    for (float& x : params.v) x = 2.0f * rng.next_float() - 1.0f;
    params.b = bias ? 2.0f * rng.next_float() - 1.0f : 0.0f;
    return params;
}

inline std::vector<std::int32_t> random_doc(cnnrules::Pcg32& rng, std::int32_t vocab_size,
                                            std::size_t len) {
    std::vector<std::int32_t> ids(len);
    for (auto& id : ids) {
        id = 2 + static_cast<std::int32_t>(rng.next_bounded(static_cast<std::uint32_t>(vocab_size - 2)));
    }
    return ids;
}

}  // namespace oracles

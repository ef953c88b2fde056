#include "cnnrules/model.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cnnrules/corpus.hpp"
#include "cnnrules/errors.hpp"
#include "cnnrules/init.hpp"
#include "cnnrules/loss.hpp"

static_assert(std::endian::native == std::endian::little, "checkpoint format assumes a little-endian host");

namespace cnnrules {

void ModelConfig::validate() const {
    if (vocab_size < 2) throw ConfigError("model: vocab_size must be at least 2");
    if (d == 0 || n == 0 || max_width == 0) throw ConfigError("model: d, n and max_width must be positive");
}

Parameters init_parameters(const ModelConfig& config, std::uint64_t seed) {
    config.validate();
    Parameters params;
    params.config = config;

    Pcg32 emb_rng = make_rng(seed, RngStream::embeddings);
    params.E = uniform_init(emb_rng, static_cast<std::size_t>(config.vocab_size), config.d, 0.1f);
    for (std::size_t j = 0; j < config.d; ++j) params.E.at(kPadId, j) = 0.0f;

    Pcg32 w_rng = make_rng(seed, RngStream::filters);
    params.W.reserve(config.max_width);
    for (std::size_t width = 1; width <= config.max_width; ++width) {
        params.W.push_back(glorot_uniform(w_rng, width * config.d, config.n));
    }

    Pcg32 v_rng = make_rng(seed, RngStream::output);
    Matrix v_mat = glorot_uniform(v_rng, config.max_width * config.n, 1);
    params.v = std::move(v_mat.data);
    params.b = 0.0f;
    return params;
}

float forward(const Parameters& params, std::span<const std::int32_t> token_ids, ForwardCache* cache) {
    const ModelConfig& cfg = params.config;
    const std::size_t len = token_ids.size();
    if (len == 0) throw ContractViolation("forward: document must have length >= 1");
    for (const std::int32_t id : token_ids) {
        if (id < 0 || id >= cfg.vocab_size) {
            throw ContractViolation("forward: token id " + std::to_string(id) +
                                    " outside vocabulary of size " + std::to_string(cfg.vocab_size));
        }
    }

    if (cache) {
        cache->token_ids.assign(token_ids.begin(), token_ids.end());
        cache->preacts.assign(cfg.max_width, Matrix());
        cache->argmax.assign(cfg.max_width, {});
        cache->pooled.assign(cfg.max_width * cfg.n, 0.0f);
    }

    const std::size_t d = cfg.d;
    std::vector<float> window;
    std::vector<float> pooled(cfg.max_width * cfg.n, 0.0f);
    std::vector<std::size_t> argmax_w(cfg.n, 0);
    Matrix preacts;

    float logit = 0.0f;
    for (std::size_t width = 1; width <= cfg.max_width; ++width) {
        const Matrix& w = params.W[width - 1];
        const std::size_t back = (width - 1) / 2;
        window.assign(width * d, 0.0f);
        preacts = Matrix(cfg.n, len);
        std::fill(argmax_w.begin(), argmax_w.end(), 0);
        float* pooled_w = pooled.data() + (width - 1) * cfg.n;

        for (std::size_t pos = 0; pos < len; ++pos) {
            std::fill(window.begin(), window.end(), 0.0f);
            for (std::size_t s = 0; s < width; ++s) {
                const std::ptrdiff_t t = static_cast<std::ptrdiff_t>(pos + s) - static_cast<std::ptrdiff_t>(back);
                if (t < 0 || t >= static_cast<std::ptrdiff_t>(len)) continue;
                const float* emb = params.E.row(static_cast<std::size_t>(token_ids[t]));
                std::memcpy(window.data() + s * d, emb, d * sizeof(float));
            }
            for (std::size_t f = 0; f < cfg.n; ++f) {
                const float pre = dot(w.row(f), window.data(), width * d);
                preacts.at(f, pos) = pre;
                const float act = pre > 0.0f ? pre : 0.0f;
                if (pos == 0 || act > pooled_w[f]) {
                    pooled_w[f] = act;
                    argmax_w[f] = pos;
                }
            }
        }
        for (std::size_t f = 0; f < cfg.n; ++f) {
            logit += params.v[params.v_index(width, f)] * pooled_w[f];
        }
        if (cache) {
            cache->preacts[width - 1] = std::move(preacts);
            cache->argmax[width - 1] = argmax_w;
        }
    }
    if (cfg.has_output_bias) logit += params.b;
    if (cache) {
        cache->pooled = std::move(pooled);
        cache->logit = logit;
    }
    return logit;
}

float* DocGradients::e_row(std::int32_t token, std::size_t d) {
    auto it = e_slot.find(token);
    if (it == e_slot.end()) {
        it = e_slot.emplace(token, e_rows.size()).first;
        e_rows.push_back(token);
        e_data.resize(e_data.size() + d, 0.0f);
    }
    return e_data.data() + it->second * d;
}

Matrix DocGradients::dense_E(std::int32_t vocab_size, std::size_t d) const {
    Matrix grad(static_cast<std::size_t>(vocab_size), d);
    for (std::size_t r = 0; r < e_rows.size(); ++r) {
        float* dst = grad.row(static_cast<std::size_t>(e_rows[r]));
        const float* src = e_data.data() + r * d;
        for (std::size_t j = 0; j < d; ++j) dst[j] += src[j];
    }
    return grad;
}

DocGradients backward(const Parameters& params, const ForwardCache& cache, int y) {
    const ModelConfig& cfg = params.config;
    if (cache.pooled.size() != cfg.max_width * cfg.n) {
        throw ContractViolation("backward: cache does not match model configuration");
    }
    const std::size_t len = cache.token_ids.size();
    const std::size_t d = cfg.d;

    DocGradients grads;
    grads.W.reserve(cfg.max_width);
    for (std::size_t width = 1; width <= cfg.max_width; ++width) grads.W.emplace_back(cfg.n, width * d);
    grads.v.assign(cfg.max_width * cfg.n, 0.0f);

    const auto dz = static_cast<float>(stable_bce_from_logit(cache.logit, y).dloss_dz);
    if (cfg.has_output_bias) grads.b = dz;

    for (std::size_t width = 1; width <= cfg.max_width; ++width) {
        const Matrix& w = params.W[width - 1];
        Matrix& gw = grads.W[width - 1];
        const std::size_t back = (width - 1) / 2;
        for (std::size_t f = 0; f < cfg.n; ++f) {
            const std::size_t idx = params.v_index(width, f);
            grads.v[idx] = dz * cache.pooled[idx];
            // pooled > 0 iff the argmax pre-activation is > 0; at <= 0 the
            // ReLU subgradient is 0 and nothing flows further.
            if (cache.pooled[idx] <= 0.0f) continue;
            const float gpre = dz * params.v[idx];
            const std::size_t pos = cache.argmax[width - 1][f];
            for (std::size_t s = 0; s < width; ++s) {
                const std::ptrdiff_t t = static_cast<std::ptrdiff_t>(pos + s) - static_cast<std::ptrdiff_t>(back);
                if (t < 0 || t >= static_cast<std::ptrdiff_t>(len)) continue;
                const std::int32_t token = cache.token_ids[static_cast<std::size_t>(t)];
                const float* emb = params.E.row(static_cast<std::size_t>(token));
                float* gw_slab = gw.row(f) + s * d;
                for (std::size_t j = 0; j < d; ++j) gw_slab[j] += gpre * emb[j];
                if (token == kPadId) continue;  // PAD embedding is frozen
                const float* w_slab = w.row(f) + s * d;
                float* ge = grads.e_row(token, d);
                for (std::size_t j = 0; j < d; ++j) ge[j] += gpre * w_slab[j];
            }
        }
    }
    return grads;
}

int predict_from_logit(float logit) { return logit < 0.0f ? 0 : 1; }

int predict(const Parameters& params, std::span<const std::int32_t> token_ids) {
    return predict_from_logit(forward(params, token_ids));
}

// ---------------------------------------------------------------------------
// checkpoint io
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'C', 'N', 'R', 'L'};
constexpr std::uint8_t kVersion = 0x01;

void write_exact(std::ofstream& out, const void* data, std::size_t size) {
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
}

std::string header_json(const Parameters& params, std::uint64_t seed, const std::string& vocab_path) {
    const ModelConfig& cfg = params.config;
    std::ostringstream widths;
    for (std::size_t width = 1; width <= cfg.max_width; ++width) {
        if (width > 1) widths << ',';
        widths << width;
    }
    // Fixed key order so identical runs write identical bytes.
    std::ostringstream ss;
    ss << "{\"vocab_size\":" << cfg.vocab_size << ",\"d\":" << cfg.d << ",\"widths\":[" << widths.str()
       << "],\"n\":" << cfg.n << ",\"has_output_bias\":" << (cfg.has_output_bias ? "true" : "false")
       << ",\"seed\":" << seed << ",\"vocab\":" << nlohmann::json(vocab_path).dump() << "}";
    return ss.str();
}

}  // namespace

void save_checkpoint(const Parameters& params, std::uint64_t seed, const std::string& vocab_path,
                     const std::string& out_path) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IngestionError("cannot write checkpoint: " + out_path);
    const std::string header = header_json(params, seed, vocab_path);
    const auto header_len = static_cast<std::uint32_t>(header.size());

    write_exact(out, kMagic, 4);
    write_exact(out, &kVersion, 1);
    write_exact(out, &header_len, 4);
    write_exact(out, header.data(), header.size());
    write_exact(out, params.E.data.data(), params.E.data.size() * sizeof(float));
    for (const Matrix& w : params.W) write_exact(out, w.data.data(), w.data.size() * sizeof(float));
    write_exact(out, params.v.data(), params.v.size() * sizeof(float));
    if (params.config.has_output_bias) write_exact(out, &params.b, sizeof(float));
    if (!out) throw IngestionError("short write to checkpoint: " + out_path);
}

namespace {

void read_exact(std::ifstream& in, void* data, std::size_t size, std::size_t offset, const std::string& what) {
    in.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
    if (static_cast<std::size_t>(in.gcount()) != size) {
        throw FormatError("checkpoint truncated at offset " + std::to_string(offset) + " while reading " + what);
    }
}

}  // namespace

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestionError("cannot read checkpoint: " + path);

    char magic[4];
    read_exact(in, magic, 4, 0, "magic");
    if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("bad checkpoint magic at offset 0");
    std::uint8_t version = 0;
    read_exact(in, &version, 1, 4, "version");
    if (version != kVersion) {
        throw FormatError("unsupported checkpoint version " + std::to_string(version) + " at offset 4");
    }
    std::uint32_t header_len = 0;
    read_exact(in, &header_len, 4, 5, "header length");
    std::string header(header_len, '\0');
    read_exact(in, header.data(), header_len, 9, "header");

    nlohmann::json meta = nlohmann::json::parse(header, nullptr, false);
    if (meta.is_discarded()) throw FormatError("checkpoint header at offset 9 is not valid JSON");
    for (const char* key : {"vocab_size", "d", "widths", "n", "has_output_bias", "seed"}) {
        if (!meta.contains(key)) throw FormatError(std::string("checkpoint header missing key: ") + key);
    }
    const auto widths = meta["widths"].get<std::vector<std::size_t>>();
    for (std::size_t i = 0; i < widths.size(); ++i) {
        if (widths[i] != i + 1) throw FormatError("checkpoint widths must be contiguous from 1");
    }
    if (widths.empty()) throw FormatError("checkpoint widths must be nonempty");

    Checkpoint ckpt;
    ModelConfig cfg;
    cfg.vocab_size = meta["vocab_size"].get<std::int32_t>();
    cfg.d = meta["d"].get<std::size_t>();
    cfg.n = meta["n"].get<std::size_t>();
    cfg.max_width = widths.size();
    cfg.has_output_bias = meta["has_output_bias"].get<bool>();
    cfg.validate();
    ckpt.seed = meta["seed"].get<std::uint64_t>();
    if (meta.contains("vocab")) ckpt.vocab_path = meta["vocab"].get<std::string>();

    Parameters& params = ckpt.params;
    params.config = cfg;
    std::size_t offset = 9 + header_len;
    auto read_tensor = [&](float* data, std::size_t count, const std::string& what) {
        read_exact(in, data, count * sizeof(float), offset, what);
        offset += count * sizeof(float);
    };

    params.E = Matrix(static_cast<std::size_t>(cfg.vocab_size), cfg.d);
    read_tensor(params.E.data.data(), params.E.data.size(), "tensor E");
    for (std::size_t width = 1; width <= cfg.max_width; ++width) {
        params.W.emplace_back(cfg.n, width * cfg.d);
        read_tensor(params.W.back().data.data(), params.W.back().size(), "tensor W" + std::to_string(width));
    }
    params.v.assign(cfg.max_width * cfg.n, 0.0f);
    read_tensor(params.v.data(), params.v.size(), "tensor v");
    if (cfg.has_output_bias) read_tensor(&params.b, 1, "tensor b");

    char extra = 0;
    in.read(&extra, 1);
    if (in.gcount() != 0) {
        throw FormatError("checkpoint has trailing bytes at offset " + std::to_string(offset));
    }
    return ckpt;
}

}  // namespace cnnrules

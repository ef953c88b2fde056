#include "cnnrules/trainer.hpp"

#include <cstdio>
#include <fstream>
#include <span>

#include "cnnrules/errors.hpp"
#include "cnnrules/loss.hpp"
#include "cnnrules/optim.hpp"
#include "cnnrules/threads.hpp"

namespace cnnrules {

void TrainConfig::validate() const {
    if (lr <= 0.0f) throw ConfigError("train: lr must be positive");
    if (batch_size == 0 || max_epochs == 0) throw ConfigError("train: batch_size and max_epochs must be positive");
    if (patience > max_epochs) throw ConfigError("train: patience must not exceed max_epochs");
}

namespace {

struct DocResult {
    DocGradients grads;
    double loss = 0.0;
    int correct = 0;
};

// Accumulators for one batch, reduced over documents in ascending row order.
struct BatchAccum {
    Matrix E;
    std::vector<Matrix> W;
    std::vector<float> v;
    float b = 0.0f;

    explicit BatchAccum(const ModelConfig& cfg) : E(static_cast<std::size_t>(cfg.vocab_size), cfg.d) {
        for (std::size_t width = 1; width <= cfg.max_width; ++width) W.emplace_back(cfg.n, width * cfg.d);
        v.assign(cfg.max_width * cfg.n, 0.0f);
    }

    void zero() {
        std::fill(E.data.begin(), E.data.end(), 0.0f);
        for (Matrix& w : W) std::fill(w.data.begin(), w.data.end(), 0.0f);
        std::fill(v.begin(), v.end(), 0.0f);
        b = 0.0f;
    }

    void add(const DocGradients& g, std::size_t d) {
        for (std::size_t r = 0; r < g.e_rows.size(); ++r) {
            float* dst = E.row(static_cast<std::size_t>(g.e_rows[r]));
            const float* src = g.e_data.data() + r * d;
            for (std::size_t j = 0; j < d; ++j) dst[j] += src[j];
        }
        for (std::size_t w = 0; w < W.size(); ++w) {
            for (std::size_t i = 0; i < W[w].size(); ++i) W[w].data[i] += g.W[w].data[i];
        }
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += g.v[i];
        b += g.b;
    }

    void scale(float s) {
        for (float& x : E.data) x *= s;
        for (Matrix& w : W) {
            for (float& x : w.data) x *= s;
        }
        for (float& x : v) x *= s;
        b *= s;
    }
};

struct Optimizer {
    AdamState e_state;
    std::vector<AdamState> w_states;
    AdamState v_state;
    AdamState b_state;

    explicit Optimizer(const Parameters& params)
        : e_state(params.E.size()), v_state(params.v.size()), b_state(1) {
        for (const Matrix& w : params.W) w_states.emplace_back(w.size());
    }

    void step(Parameters& params, const BatchAccum& grads, float lr) {
        adam_step(params.E.data, grads.E.data, e_state, lr);
        // PAD gradients are zero by construction; keep the row exactly zero anyway.
        for (std::size_t j = 0; j < params.config.d; ++j) params.E.at(kPadId, j) = 0.0f;
        for (std::size_t w = 0; w < params.W.size(); ++w) {
            adam_step(params.W[w].data, grads.W[w].data, w_states[w], lr);
        }
        adam_step(params.v, grads.v, v_state, lr);
        if (params.config.has_output_bias) {
            adam_step(std::span<float>(&params.b, 1), std::span<const float>(&grads.b, 1), b_state, lr);
        }
    }
};

}  // namespace

double evaluate(const Parameters& params, const std::vector<Document>& docs) {
    if (docs.empty()) throw ConfigError("evaluate: empty document list");
    std::vector<std::uint8_t> correct(docs.size(), 0);
    parallel_for(docs.size(), [&](std::size_t i) {
        correct[i] = predict(params, docs[i].token_ids) == docs[i].label ? 1 : 0;
    });
    std::size_t hits = 0;
    for (const std::uint8_t c : correct) hits += c;
    return static_cast<double>(hits) / static_cast<double>(docs.size());
}

TrainResult train(const ModelConfig& model_config, const TrainConfig& train_config,
                  const std::vector<Document>& train_docs, const std::vector<Document>& val_docs) {
    model_config.validate();
    train_config.validate();
    if (train_docs.empty() || val_docs.empty()) throw ConfigError("train: empty split");

    Parameters params = init_parameters(model_config, train_config.seed);
    Optimizer optimizer(params);
    Pcg32 shuffle_rng = make_rng(train_config.seed, RngStream::shuffling);

    TrainResult result;
    Parameters best_params = params;
    double best_val = -1.0;
    std::size_t epochs_since_improvement = 0;

    BatchAccum accum(model_config);
    for (std::size_t epoch = 1; epoch <= train_config.max_epochs; ++epoch) {
        const std::vector<Batch> batches = make_batches(train_docs, train_config.batch_size, shuffle_rng);
        double loss_sum = 0.0;
        std::size_t correct = 0;
        for (const Batch& batch : batches) {
            std::vector<DocResult> results(batch.rows);
            parallel_for(batch.rows, [&](std::size_t r) {
                const std::span<const std::int32_t> ids(batch.ids.data() + r * batch.len, batch.len);
                ForwardCache cache;
                const float logit = forward(params, ids, &cache);
                DocResult& res = results[r];
                res.grads = backward(params, cache, batch.labels[r]);
                res.loss = stable_bce_from_logit(logit, batch.labels[r]).loss;
                res.correct = predict_from_logit(logit) == batch.labels[r] ? 1 : 0;
            });
            accum.zero();
            for (std::size_t r = 0; r < batch.rows; ++r) {
                accum.add(results[r].grads, model_config.d);
                loss_sum += results[r].loss;
                correct += static_cast<std::size_t>(results[r].correct);
            }
            accum.scale(1.0f / static_cast<float>(batch.rows));
            optimizer.step(params, accum, train_config.lr);
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_loss = loss_sum / static_cast<double>(train_docs.size());
        stats.train_acc = static_cast<double>(correct) / static_cast<double>(train_docs.size());
        stats.val_acc = evaluate(params, val_docs);
        result.history.epochs.push_back(stats);

        if (stats.val_acc > best_val) {
            best_val = stats.val_acc;
            best_params = params;
            result.history.best_epoch = epoch;
            epochs_since_improvement = 0;
        } else {
            ++epochs_since_improvement;
        }
        if (epochs_since_improvement >= train_config.patience) break;
    }

    result.params = std::move(best_params);
    return result;
}

void save_history_jsonl(const TrainHistory& history, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IngestionError("cannot write history: " + path);
    for (const EpochStats& e : history.epochs) {
        char line[160];
        std::snprintf(line, sizeof(line),
                      "{\"epoch\":%zu,\"train_loss\":%.6f,\"train_acc\":%.4f,\"val_acc\":%.4f}\n", e.epoch,
                      e.train_loss, e.train_acc, e.val_acc);
        out << line;
    }
}

}  // namespace cnnrules

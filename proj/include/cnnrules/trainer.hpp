#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cnnrules/corpus.hpp"
#include "cnnrules/model.hpp"

namespace cnnrules {

struct TrainConfig {
    float lr = 1e-3f;
    std::size_t batch_size = 64;
    std::size_t max_epochs = 10;
    std::size_t patience = 2;
    std::uint64_t seed = 0;

    void validate() const;
};

struct EpochStats {
    std::size_t epoch = 0;  // 1-based
    double train_loss = 0.0;
    double train_acc = 0.0;
    double val_acc = 0.0;
};

struct TrainHistory {
    std::vector<EpochStats> epochs;
    std::size_t best_epoch = 0;  // 1-based; earliest maximum of val_acc
};

struct TrainResult {
    Parameters params;  // checkpoint from the best epoch
    TrainHistory history;
};

// Adam on mean-of-batch gradients; stops once validation accuracy has not
// improved for `patience` consecutive epochs. Bitwise deterministic given
// (seed, data, config), independent of the worker count.
TrainResult train(const ModelConfig& model_config, const TrainConfig& train_config,
                  const std::vector<Document>& train_docs, const std::vector<Document>& val_docs);

// Fraction of documents with predict == label.
double evaluate(const Parameters& params, const std::vector<Document>& docs);

// One JSON object per epoch, LF-terminated.
void save_history_jsonl(const TrainHistory& history, const std::string& path);

}  // namespace cnnrules

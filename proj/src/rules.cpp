#include "cnnrules/rules.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "cnnrules/errors.hpp"
#include "cnnrules/loss.hpp"
#include "cnnrules/optim.hpp"
#include "cnnrules/threads.hpp"

namespace cnnrules {

RuleMode parse_rule_mode(const std::string& name) {
    if (name == "conjunction") return RuleMode::conjunction;
    if (name == "disjunction") return RuleMode::disjunction;
    throw ConfigError("unknown rule mode: " + name + " (expected conjunction or disjunction)");
}

VoteMode parse_vote_mode(const std::string& name) {
    if (name == "count") return VoteMode::count;
    if (name == "weighted") return VoteMode::weighted;
    throw ConfigError("unknown vote mode: " + name + " (expected count or weighted)");
}

std::size_t FeatureVector::count() const {
    std::size_t total = 0;
    for (const std::uint64_t block : bits) total += static_cast<std::size_t>(std::popcount(block));
    return total;
}

namespace {

std::string pack_ngram(const std::int32_t* ids, std::size_t len) {
    std::string key(len * sizeof(std::int32_t), '\0');
    std::memcpy(key.data(), ids, len * sizeof(std::int32_t));
    return key;
}

void index_feature(RuleSet& rules, const RuleFeature& feature) {
    for (const auto& pattern : feature.patterns) {
        rules.pattern_index[pack_ngram(pattern.data(), pattern.size())].push_back(feature.id);
        rules.max_pattern_len = std::max(rules.max_pattern_len, pattern.size());
    }
}

}  // namespace

RuleSet build_rules(const std::vector<FilterInterpretation>& interpretations, RuleMode mode) {
    RuleSet rules;
    rules.mode = mode;
    for (const FilterInterpretation& interp : interpretations) {
        for (const auto& position : interp.positions) {
            for (const ExtractedWord& w : position) {
                if (w.word_id < 0) {
                    throw ContractViolation("build_rules: interpretations must carry word ids");
                }
            }
        }
        if (mode == RuleMode::conjunction) {
            RuleFeature feature;
            feature.id = rules.features.size();
            feature.width = interp.width;
            feature.filter_index = interp.filter_index;
            feature.weight = interp.v_weight;
            // cartesian product over positions, first position outermost
            std::vector<std::int32_t> current(interp.width, 0);
            std::vector<std::size_t> pick(interp.width, 0);
            for (;;) {
                for (std::size_t s = 0; s < interp.width; ++s) {
                    current[s] = interp.positions[s][pick[s]].word_id;
                }
                feature.patterns.push_back(current);
                std::size_t s = interp.width;
                bool advanced = false;
                while (s > 0) {
                    --s;
                    if (++pick[s] < interp.positions[s].size()) {
                        advanced = true;
                        break;
                    }
                    pick[s] = 0;
                }
                if (!advanced) break;
            }
            index_feature(rules, feature);
            rules.features.push_back(std::move(feature));
        } else {
            for (std::size_t s = 0; s < interp.width; ++s) {
                RuleFeature feature;
                feature.id = rules.features.size();
                feature.width = interp.width;
                feature.filter_index = interp.filter_index;
                feature.position = s;
                feature.weight = interp.v_weight;
                for (const ExtractedWord& w : interp.positions[s]) {
                    feature.patterns.push_back({w.word_id});
                }
                index_feature(rules, feature);
                rules.features.push_back(std::move(feature));
            }
        }
    }
    return rules;
}

FeatureVector fire(std::span<const std::int32_t> token_ids, const RuleSet& rules) {
    FeatureVector fired;
    fired.resize(rules.features.size());
    for (std::size_t start = 0; start < token_ids.size(); ++start) {
        if (token_ids[start] == kPadId) continue;
        const std::size_t max_len = std::min(rules.max_pattern_len, token_ids.size() - start);
        for (std::size_t len = 1; len <= max_len; ++len) {
            if (token_ids[start + len - 1] == kPadId) break;
            const auto it = rules.pattern_index.find(pack_ngram(token_ids.data() + start, len));
            if (it == rules.pattern_index.end()) continue;
            for (const std::size_t id : it->second) fired.set(id);
        }
    }
    return fired;
}

int rule_classify(const FeatureVector& fired, const RuleSet& rules, VoteMode vote_mode) {
    long count_sum = 0;
    double weight_sum = 0.0;
    for (const RuleFeature& feature : rules.features) {
        if (!fired.test(feature.id)) continue;
        count_sum += feature.weight > 0.0f ? 1 : (feature.weight < 0.0f ? -1 : 0);
        weight_sum += static_cast<double>(feature.weight);
    }
    if (vote_mode == VoteMode::count) {
        if (count_sum > 0) return 1;
        if (count_sum < 0) return 0;
    } else {
        if (weight_sum > 0.0) return 1;
        if (weight_sum < 0.0) return 0;
    }
    if (weight_sum > 0.0) return 1;
    if (weight_sum < 0.0) return 0;
    return 1;
}

std::vector<FeatureVector> featurize_corpus(const std::vector<Document>& docs, const RuleSet& rules) {
    std::vector<FeatureVector> features(docs.size());
    parallel_for(docs.size(), [&](std::size_t i) { features[i] = fire(docs[i].token_ids, rules); });
    return features;
}

LinearModel train_logistic(const std::vector<FeatureVector>& features, const std::vector<int>& labels,
                           const LogisticConfig& config) {
    if (features.empty() || features.size() != labels.size()) {
        throw ConfigError("train_logistic: features and labels must be nonempty and aligned");
    }
    const std::size_t n_features = features.front().feature_count;
    if (n_features == 0) throw ConfigError("train_logistic: at least one feature required");
    bool saw[2] = {false, false};
    for (const int y : labels) {
        if (y != 0 && y != 1) throw ConfigError("train_logistic: labels must be 0 or 1");
        saw[y] = true;
    }
    if (!saw[0] || !saw[1]) throw ConfigError("train_logistic: both classes must be present");

    LinearModel model;
    model.weights.assign(n_features, 0.0f);
    model.l2 = config.l2;

    AdamState w_state(n_features);
    AdamState b_state(1);
    Pcg32 rng = make_rng(config.seed, RngStream::logistic);
    std::vector<std::size_t> order(features.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::vector<float> w_grad(n_features, 0.0f);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle(order, rng);
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t rows = std::min(config.batch_size, order.size() - start);
            std::fill(w_grad.begin(), w_grad.end(), 0.0f);
            float b_grad = 0.0f;
            for (std::size_t r = 0; r < rows; ++r) {
                const FeatureVector& fv = features[order[start + r]];
                double z = model.bias;
                for (std::size_t i = 0; i < n_features; ++i) {
                    if (fv.test(i)) z += model.weights[i];
                }
                const auto g = static_cast<float>(
                    stable_bce_from_logit(z, labels[order[start + r]]).dloss_dz);
                for (std::size_t i = 0; i < n_features; ++i) {
                    if (fv.test(i)) w_grad[i] += g;
                }
                b_grad += g;
            }
            const float inv_rows = 1.0f / static_cast<float>(rows);
            for (std::size_t i = 0; i < n_features; ++i) {
                w_grad[i] = w_grad[i] * inv_rows + config.l2 * model.weights[i];
            }
            b_grad *= inv_rows;  // no L2 on the bias
            adam_step(model.weights, w_grad, w_state, config.lr);
            adam_step(std::span<float>(&model.bias, 1), std::span<const float>(&b_grad, 1), b_state,
                      config.lr);
        }
    }
    return model;
}

int linear_classify(const LinearModel& model, const FeatureVector& fired) {
    if (fired.feature_count != model.weights.size()) {
        throw ContractViolation("linear_classify: feature dimension mismatch");
    }
    double z = model.bias;
    for (std::size_t i = 0; i < model.weights.size(); ++i) {
        if (fired.test(i)) z += model.weights[i];
    }
    return z < 0.0 ? 0 : 1;
}

void save_feature_matrix(const std::vector<FeatureVector>& features, const std::vector<int>& labels,
                         const std::string& path) {
    if (features.size() != labels.size()) {
        throw ContractViolation("save_feature_matrix: features and labels must align");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IngestionError("cannot write feature matrix: " + path);
    for (std::size_t r = 0; r < features.size(); ++r) {
        out << labels[r] << '\t';
        bool first = true;
        for (std::size_t i = 0; i < features[r].feature_count; ++i) {
            if (!features[r].test(i)) continue;
            if (!first) out << ',';
            out << i;
            first = false;
        }
        out << '\n';
    }
}

void save_predictions_tsv(const std::vector<Document>& docs, const std::vector<int>& preds,
                          const std::string& path) {
    if (docs.size() != preds.size()) {
        throw ContractViolation("save_predictions_tsv: docs and predictions must align");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IngestionError("cannot write predictions: " + path);
    for (std::size_t i = 0; i < docs.size(); ++i) {
        out << docs[i].source_name << '\t' << docs[i].label << '\t' << preds[i] << '\n';
    }
}

}  // namespace cnnrules

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cnnrules/corpus.hpp"
#include "cnnrules/extraction.hpp"
#include "cnnrules/rng.hpp"

namespace cnnrules {

enum class RuleMode { conjunction, disjunction };
enum class VoteMode { count, weighted };

RuleMode parse_rule_mode(const std::string& name);
VoteMode parse_vote_mode(const std::string& name);

// One binary existential feature: fires when any of its patterns occurs as
// a contiguous run of token ids. Conjunction features own the full cartesian
// product of a filter's per-position words (m^j patterns of length j);
// disjunction features own one position's m words as unigrams.
struct RuleFeature {
    std::size_t id = 0;
    std::size_t width = 1;
    std::size_t filter_index = 0;
    std::optional<std::size_t> position;  // set for disjunction features
    float weight = 0.0f;                  // the filter's v entry
    std::vector<std::vector<std::int32_t>> patterns;
};

struct RuleSet {
    RuleMode mode = RuleMode::conjunction;
    std::size_t max_pattern_len = 1;
    std::vector<RuleFeature> features;
    // n-gram (packed ids) -> feature ids, for matching in one doc scan
    std::unordered_map<std::string, std::vector<std::size_t>> pattern_index;
};

struct FeatureVector {
    std::vector<std::uint64_t> bits;
    std::size_t feature_count = 0;

    void resize(std::size_t n) {
        feature_count = n;
        bits.assign((n + 63) / 64, 0);
    }
    void set(std::size_t i) { bits[i / 64] |= (std::uint64_t{1} << (i % 64)); }
    bool test(std::size_t i) const { return (bits[i / 64] >> (i % 64)) & 1u; }
    std::size_t count() const;
};

// Requires interpretations carrying real word ids (from extract_all, not the
// JSON round trip).
RuleSet build_rules(const std::vector<FilterInterpretation>& interpretations, RuleMode mode);

// PAD never matches: patterns hold vocabulary words only and document
// n-grams containing PAD are not indexed.
FeatureVector fire(std::span<const std::int32_t> token_ids, const RuleSet& rules);

// Sign vote over fired features. Ties fall back to the weighted sum; a zero
// weighted sum resolves to label 1.
int rule_classify(const FeatureVector& fired, const RuleSet& rules, VoteMode vote_mode = VoteMode::count);

std::vector<FeatureVector> featurize_corpus(const std::vector<Document>& docs, const RuleSet& rules);

struct LinearModel {
    std::vector<float> weights;
    float bias = 0.0f;
    float l2 = 0.0f;
};

struct LogisticConfig {
    float l2 = 1e-4f;
    float lr = 1e-3f;
    std::size_t epochs = 20;
    std::size_t batch_size = 256;
    std::uint64_t seed = 0;  // draws on the logistic stream
};

// Logistic regression on the binary features: Adam, L2 on weights only.
LinearModel train_logistic(const std::vector<FeatureVector>& features, const std::vector<int>& labels,
                           const LogisticConfig& config);

// 1 iff bias + sum of fired weights > 0; an exact 0 resolves to 1.
int linear_classify(const LinearModel& model, const FeatureVector& fired);

// One line per document: "label<TAB>id,id,...".
void save_feature_matrix(const std::vector<FeatureVector>& features, const std::vector<int>& labels,
                         const std::string& path);

// TSV "source_name<TAB>gold<TAB>pred".
void save_predictions_tsv(const std::vector<Document>& docs, const std::vector<int>& preds,
                          const std::string& path);

}  // namespace cnnrules

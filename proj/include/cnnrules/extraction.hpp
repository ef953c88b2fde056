#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cnnrules/corpus.hpp"
#include "cnnrules/model.hpp"

namespace cnnrules {

struct ExtractedWord {
    std::int32_t word_id = 0;
    std::string word;
    float score = 0.0f;  // dot product of the embedding with the weight vector
};

// One trained filter read as words: per kernel position, the top-m
// vocabulary words by embedding dot product with that position's weight
// vector, ordered by (score desc, word_id asc).
struct FilterInterpretation {
    std::size_t width = 1;
    std::size_t filter_index = 0;
    float v_weight = 0.0f;
    std::vector<std::vector<ExtractedWord>> positions;  // width lists of m words
};

// Exact top-m scan over all non-reserved embedding rows.
std::vector<ExtractedWord> top_words(const float* weight_vector, const Matrix& embeddings,
                                     const Vocabulary& vocab, std::size_t m);

std::vector<FilterInterpretation> extract_all(const Parameters& params, const Vocabulary& vocab,
                                              std::size_t m = 3);

// "word (score), word (score), ..." with three-decimal scores.
std::string render_words(const std::vector<ExtractedWord>& words);

// JSON array of {width, filter_index, v_weight, positions:[[{word,score},...],...]};
// scores carry 6 significant digits.
void save_interpretations_json(const std::vector<FilterInterpretation>& interps, const std::string& path);

// Reads the export back. word_id is not stored in the file and loads as -1;
// analyses only use the word text and v_weight.
std::vector<FilterInterpretation> load_interpretations_json(const std::string& path);

}  // namespace cnnrules
